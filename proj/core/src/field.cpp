#include "mfg/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "mfg/errors.hpp"

namespace mfg {

Field::Field(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

Field::Field(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ConfigError("field value count does not match grid size");
  }
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(grid_, other.grid_, "field addition");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(grid_, other.grid_, "field subtraction");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

VectorField::VectorField(const Grid& grid)
    : components_(static_cast<std::size_t>(grid.dim()), Field(grid)) {}

VectorField::VectorField(std::vector<Field> components) : components_(std::move(components)) {
  if (components_.empty()) throw ConfigError("vector field needs at least one component");
  for (const auto& c : components_) require_same_grid(c.grid(), components_.front().grid(), "vector field");
}

Point VectorField::at(std::size_t flat) const {
  Point v{0.0, 0.0};
  for (int a = 0; a < dim(); ++a) v[a] = components_[a][flat];
  return v;
}

VectorField& VectorField::operator+=(const VectorField& other) {
  for (int a = 0; a < dim(); ++a) components_[a] += other.components_[a];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (auto& c : components_) c *= s;
  return *this;
}

VectorField operator-(const VectorField& v) {
  VectorField out = v;
  out *= -1.0;
  return out;
}

void require_same_grid(const Grid& a, const Grid& b, std::string_view context) {
  if (!(a == b)) {
    throw ConfigError(std::string(context) + ": grid mismatch");
  }
}

Field field_from_function(const Grid& grid, const ScalarFunction& fn) {
  Field out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    const double v = fn(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite function value at node " << i << " (x = " << x[0];
      if (grid.dim() == 2) msg << ", " << x[1];
      msg << ")";
      throw NumericalError(msg.str());
    }
    out[i] = v;
  }
  return out;
}

double integrate(const Field& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().cell_volume();
}

namespace {

// Derivative along one axis of a line of n samples with stride `stride`.
void differentiate_line(const double* in, double* out, int n, std::size_t stride, double h) {
  const double inv2h = 1.0 / (2.0 * h);
  auto at = [&](int k) { return in[static_cast<std::size_t>(k) * stride]; };
  auto put = [&](int k, double v) { out[static_cast<std::size_t>(k) * stride] = v; };
  put(0, (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h);
  for (int k = 1; k < n - 1; ++k) put(k, (at(k + 1) - at(k - 1)) * inv2h);
  put(n - 1, (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv2h);
}

}  // namespace

VectorField gradient(const Field& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  const int n = g.n();
  const double* in = f.values().data();
  if (g.dim() == 1) {
    differentiate_line(in, out.component(0).values().data(), n, 1, g.h());
    return out;
  }
  const auto un = static_cast<std::size_t>(n);
  // axis 0 varies slowest: stride n
  for (int k1 = 0; k1 < n; ++k1) {
    differentiate_line(in + k1, out.component(0).values().data() + k1, n, un, g.h());
  }
  for (int k0 = 0; k0 < n; ++k0) {
    differentiate_line(in + k0 * un, out.component(1).values().data() + k0 * un, n, 1, g.h());
  }
  return out;
}

double sup_norm(const Field& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double sup_norm(const VectorField& v) { return sup_norm(magnitude(v)); }

double sup_distance(const Field& f, const Field& g) {
  require_same_grid(f.grid(), g.grid(), "sup_distance");
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
  return m;
}

double sup_distance(const VectorField& f, const VectorField& g) {
  require_same_grid(f.grid(), g.grid(), "sup_distance");
  double m = 0.0;
  for (std::size_t i = 0; i < f.grid().size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < f.dim(); ++a) {
      const double d = f.component(a)[i] - g.component(a)[i];
      s += d * d;
    }
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

Field magnitude(const VectorField& v) {
  Field out(v.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < v.dim(); ++a) s += v.component(a)[i] * v.component(a)[i];
    out[i] = std::sqrt(s);
  }
  return out;
}

double holder_seminorm(const Field& f, double gamma, int window_radius) {
  if (window_radius < 1) throw ConfigError("holder window radius must be >= 1");
  const Grid& g = f.grid();
  const int n = g.n();
  const double h = g.h();
  double best = 0.0;
  if (g.dim() == 1) {
    std::vector<double> denom(window_radius + 1);
    for (int r = 1; r <= window_radius; ++r) denom[r] = std::pow(r * h, gamma);
    for (int k = 0; k < n; ++k) {
      for (int r = 1; r <= window_radius && k + r < n; ++r) {
        best = std::max(best, std::abs(f[k + r] - f[k]) / denom[r]);
      }
    }
    return best;
  }
  // Half-plane of offsets so each unordered pair is visited once.
  struct Offset { int a, b; double denom; };
  std::vector<Offset> offsets;
  for (int a = 0; a <= window_radius; ++a) {
    for (int b = -window_radius; b <= window_radius; ++b) {
      if (a == 0 && b <= 0) continue;
      if (a * a + b * b > window_radius * window_radius) continue;
      offsets.push_back({a, b, std::pow(h * std::sqrt(double(a * a + b * b)), gamma)});
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = f[g.flat_index(i, j)];
      for (const auto& o : offsets) {
        const int i2 = i + o.a, j2 = j + o.b;
        if (i2 >= n || j2 < 0 || j2 >= n) continue;
        best = std::max(best, std::abs(f[g.flat_index(i2, j2)] - v) / o.denom);
      }
    }
  }
  return best;
}

double holder_norm(const Field& f, double gamma, int window_radius) {
  return holder_seminorm(f, gamma, window_radius) + sup_norm(f);
}

namespace {

// Cell coordinate and weight along one axis, clamped to the node range.
void locate(const Grid& g, double x, int& k, double& w) {
  const double s = (x + g.half_width()) / g.h();
  const int n = g.n();
  if (s <= 0.0) { k = 0; w = 0.0; return; }
  if (s >= n - 1) { k = n - 2; w = 1.0; return; }
  k = static_cast<int>(s);
  w = s - k;
}

}  // namespace

double interpolate(const Field& f, const Point& x) {
  const Grid& g = f.grid();
  int k0;
  double w0;
  locate(g, x[0], k0, w0);
  if (g.dim() == 1) return (1.0 - w0) * f[k0] + w0 * f[k0 + 1];
  int k1;
  double w1;
  locate(g, x[1], k1, w1);
  const double f00 = f[g.flat_index(k0, k1)], f01 = f[g.flat_index(k0, k1 + 1)];
  const double f10 = f[g.flat_index(k0 + 1, k1)], f11 = f[g.flat_index(k0 + 1, k1 + 1)];
  return (1.0 - w0) * ((1.0 - w1) * f00 + w1 * f01) + w0 * ((1.0 - w1) * f10 + w1 * f11);
}

Point interpolate(const VectorField& v, const Point& x) {
  Point out{0.0, 0.0};
  for (int a = 0; a < v.dim(); ++a) out[a] = interpolate(v.component(a), x);
  return out;
}

Field resample(const Field& f, const Grid& target, double outside) {
  if (f.grid().dim() != target.dim()) throw ConfigError("resample: dimension mismatch");
  if (f.grid() == target) return f;
  const Grid& src = f.grid();
  Field out(target);
  const double lo = -src.half_width();
  const double hi = src.node(src.n() - 1);
  for (std::size_t i = 0; i < target.size(); ++i) {
    const Point x = target.point(i);
    bool inside = true;
    for (int a = 0; a < target.dim(); ++a) inside = inside && x[a] >= lo && x[a] <= hi;
    out[i] = inside ? interpolate(f, x) : outside;
  }
  return out;
}

void require_finite(const Field& f, std::string_view context) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) {
      throw NumericalError(std::string(context) + ": non-finite value at node " + std::to_string(i));
    }
  }
}

void require_finite(const VectorField& v, std::string_view context) {
  for (int a = 0; a < v.dim(); ++a) require_finite(v.component(a), context);
}

}  // namespace mfg
