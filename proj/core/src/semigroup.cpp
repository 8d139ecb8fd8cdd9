#include "mfg/semigroup.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "mfg/errors.hpp"

namespace mfg {

namespace {

// FFTW's planner is not reentrant; execution with fresh arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlans {
 public:
  FftPlans(int dim, int padded) : dim_(dim), padded_(padded) {
    const std::size_t real_count = dim == 1 ? padded : std::size_t(padded) * padded;
    const std::size_t complex_count = dim == 1 ? padded / 2 + 1 : std::size_t(padded) * (padded / 2 + 1);
    std::vector<double> r(real_count);
    std::vector<std::complex<double>> c(complex_count);
    auto* cp = reinterpret_cast<fftw_complex*>(c.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(planner_mutex());
    if (dim == 1) {
      r2c_ = fftw_plan_dft_r2c_1d(padded, r.data(), cp, flags);
      c2r_ = fftw_plan_dft_c2r_1d(padded, cp, r.data(), flags);
    } else {
      r2c_ = fftw_plan_dft_r2c_2d(padded, padded, r.data(), cp, flags);
      c2r_ = fftw_plan_dft_c2r_2d(padded, padded, cp, r.data(), flags);
    }
    if (!r2c_ || !c2r_) throw NumericalError("FFTW plan creation failed");
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
  ~FftPlans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c_);
    fftw_destroy_plan(c2r_);
  }

  std::size_t real_count() const { return dim_ == 1 ? padded_ : std::size_t(padded_) * padded_; }
  std::size_t complex_count() const {
    return dim_ == 1 ? padded_ / 2 + 1 : std::size_t(padded_) * (padded_ / 2 + 1);
  }

  void forward(std::vector<double>& in, Spectrum& out) const {
    fftw_execute_dft_r2c(r2c_, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  }
  // Destroys `in`.
  void backward(Spectrum& in, std::vector<double>& out) const {
    fftw_execute_dft_c2r(c2r_, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  }

 private:
  int dim_;
  int padded_;
  fftw_plan r2c_ = nullptr;
  fftw_plan c2r_ = nullptr;
};

// Signed lattice offset of padded index q.
int offset_of(int q, int padded) { return q <= padded / 2 ? q : q - padded; }

}  // namespace

struct HeatOperator::Kernels {
  double t = 0.0;
  std::vector<double> heat;                  // real multiplier
  std::vector<std::vector<double>> gradient; // imaginary part of each axis multiplier
};

struct HeatOperator::Impl {
  Grid grid;
  int padded;
  FftPlans plans;
  std::vector<std::shared_ptr<const Kernels>> ladder;  // sorted by t

  Impl(const Grid& g) : grid(g), padded(2 * g.n()), plans(g.dim(), 2 * g.n()) {}

  std::shared_ptr<const Kernels> build(double t) const {
    const int d = grid.dim();
    const int P = padded;
    const double h = grid.h();
    auto k = std::make_shared<Kernels>();
    k->t = t;

    // 1D factors: normalised heat kernel, analytic density and its derivative.
    std::vector<double> heat1(P), dens1(P), deriv1(P);
    double mass = 0.0;
    for (int q = 0; q < P; ++q) {
      const double x = offset_of(q, P) * h;
      const double g = std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
      dens1[q] = g * h;
      heat1[q] = g * h;
      deriv1[q] = (q == P / 2) ? 0.0 : -x / t * g * h;
      mass += heat1[q];
    }
    for (double& v : heat1) v /= mass;

    std::vector<double> buf(plans.real_count());
    Spectrum spec(plans.complex_count());
    auto fill = [&](const std::vector<double>& a0, const std::vector<double>& a1) {
      if (d == 1) {
        std::copy(a0.begin(), a0.end(), buf.begin());
      } else {
        for (int i = 0; i < P; ++i)
          for (int j = 0; j < P; ++j) buf[std::size_t(i) * P + j] = a0[i] * a1[j];
      }
      plans.forward(buf, spec);
    };

    fill(heat1, heat1);
    k->heat.resize(spec.size());
    for (std::size_t c = 0; c < spec.size(); ++c) k->heat[c] = spec[c].real();

    k->gradient.resize(d);
    for (int a = 0; a < d; ++a) {
      if (a == 0) fill(deriv1, dens1);
      else fill(dens1, deriv1);
      k->gradient[a].resize(spec.size());
      for (std::size_t c = 0; c < spec.size(); ++c) k->gradient[a][c] = spec[c].imag();
    }
    return k;
  }
};

HeatOperator::HeatOperator(const Grid& grid) : HeatOperator(grid, {}) {}

HeatOperator::HeatOperator(const Grid& grid, std::vector<double> ladder) {
  auto impl = std::make_shared<Impl>(grid);
  std::sort(ladder.begin(), ladder.end());
  for (double t : ladder) {
    if (!(t > 0.0)) throw ConfigError("heat ladder times must be positive");
    impl->ladder.push_back(impl->build(t));
  }
  impl_ = std::move(impl);
}

HeatOperator HeatOperator::with_ladder(const Grid& grid, double dt, int steps) {
  std::vector<double> ladder;
  ladder.reserve(steps);
  for (int l = 1; l <= steps; ++l) ladder.push_back(l * dt);
  return HeatOperator(grid, std::move(ladder));
}

const Grid& HeatOperator::grid() const { return impl_->grid; }

std::shared_ptr<const HeatOperator::Kernels> HeatOperator::kernels_for(double t) const {
  const auto& lad = impl_->ladder;
  auto it = std::lower_bound(lad.begin(), lad.end(), t,
                             [](const auto& k, double v) { return k->t < v; });
  const double tol = 1e-12 * std::max(1.0, t);
  if (it != lad.end() && std::abs((*it)->t - t) <= tol) return *it;
  if (it != lad.begin() && std::abs((*std::prev(it))->t - t) <= tol) return *std::prev(it);
  return impl_->build(t);
}

Spectrum HeatOperator::zero_spectrum() const { return Spectrum(impl_->plans.complex_count()); }

Spectrum HeatOperator::transform(const Field& f) const {
  require_same_grid(f.grid(), impl_->grid, "heat transform");
  const int n = impl_->grid.n();
  const int P = impl_->padded;
  std::vector<double> buf(impl_->plans.real_count(), 0.0);
  if (impl_->grid.dim() == 1) {
    std::copy(f.values().begin(), f.values().end(), buf.begin());
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) buf[std::size_t(i) * P + j] = f[impl_->grid.flat_index(i, j)];
  }
  Spectrum out(impl_->plans.complex_count());
  impl_->plans.forward(buf, out);
  return out;
}

Field HeatOperator::synthesize(const Spectrum& s) const {
  const Grid& g = impl_->grid;
  const int n = g.n();
  const int P = impl_->padded;
  Spectrum scratch = s;
  std::vector<double> buf(impl_->plans.real_count());
  impl_->plans.backward(scratch, buf);
  const double norm = 1.0 / static_cast<double>(impl_->plans.real_count());
  Field out(g);
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) out[i] = buf[i] * norm;
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[g.flat_index(i, j)] = buf[std::size_t(i) * P + j] * norm;
  }
  return out;
}

void HeatOperator::accumulate_heat(Spectrum& acc, double t, const Spectrum& s, double scale) const {
  if (t < 0.0) throw ConfigError("heat semigroup time must be >= 0");
  if (t == 0.0) {
    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += scale * s[c];
    return;
  }
  const auto k = kernels_for(t);
  for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += (scale * k->heat[c]) * s[c];
}

void HeatOperator::accumulate_gradient(Spectrum& acc, int axis, double t, const Spectrum& s,
                                       double scale) const {
  if (!(t > 0.0)) throw ConfigError("heat gradient requires t > 0");
  const auto k = kernels_for(t);
  const auto& m = k->gradient[axis];
  for (std::size_t c = 0; c < acc.size(); ++c) {
    // (i m) * s = (-m s.imag, m s.real)
    const double w = scale * m[c];
    acc[c] += std::complex<double>(-w * s[c].imag(), w * s[c].real());
  }
}

std::vector<double> HeatOperator::heat_multiplier(double t) const {
  if (t < 0.0) throw ConfigError("heat semigroup time must be >= 0");
  if (t == 0.0) return std::vector<double>(impl_->plans.complex_count(), 1.0);
  return kernels_for(t)->heat;
}

Field HeatOperator::apply(double t, const Field& f) const {
  if (t < 0.0) throw ConfigError("heat semigroup time must be >= 0, got " + std::to_string(t));
  if (t == 0.0) return f;
  const Spectrum s = transform(f);
  Spectrum acc = zero_spectrum();
  accumulate_heat(acc, t, s);
  return synthesize(acc);
}

VectorField HeatOperator::apply_gradient(double t, const Field& f) const {
  if (!(t > 0.0)) throw ConfigError("heat gradient requires t > 0, got " + std::to_string(t));
  const Spectrum s = transform(f);
  std::vector<Field> comps;
  for (int a = 0; a < impl_->grid.dim(); ++a) {
    Spectrum acc = zero_spectrum();
    accumulate_gradient(acc, a, t, s);
    comps.push_back(synthesize(acc));
  }
  return VectorField(std::move(comps));
}

}  // namespace mfg
