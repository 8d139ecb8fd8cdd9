#include "mfg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mfg/errors.hpp"
#include "mfg/rng.hpp"

namespace mfg {

namespace {

constexpr int kRampOffsets = 16;
constexpr std::array<double, 2> kRampScales{1.0, 2.0};
constexpr double kHatRadius = 1.0;

double hat(double r) { return r < kHatRadius ? 1.0 - r : 0.0; }

// <mu, f> for the dictionary functions of one measure.
class Pairing {
 public:
  virtual ~Pairing() = default;
  virtual double hat_at(const Point& c) const = 0;
  virtual double ramp(int axis, double offset, double scale) const = 0;
};

class DensityPairing final : public Pairing {
 public:
  explicit DensityPairing(const Field& f) : f_(f) {}

  double hat_at(const Point& c) const override {
    const Grid& g = f_.grid();
    const int n = g.n();
    const double h = g.h(), L = g.half_width();
    std::array<int, 2> lo{0, 0}, hi{0, 0};
    for (int a = 0; a < g.dim(); ++a) {
      lo[a] = std::max(0, static_cast<int>(std::ceil((c[a] - kHatRadius + L) / h)));
      hi[a] = std::min(n - 1, static_cast<int>(std::floor((c[a] + kHatRadius + L) / h)));
    }
    double s = 0.0;
    for (int k0 = lo[0]; k0 <= hi[0]; ++k0) {
      for (int k1 = lo[1]; k1 <= hi[1]; ++k1) {
        const std::size_t i = g.flat_index(k0, k1);
        s += f_[i] * hat(norm({g.node(k0) - c[0], g.dim() == 2 ? g.node(k1) - c[1] : 0.0}, g.dim()));
      }
    }
    return s * g.cell_volume();
  }

  double ramp(int axis, double offset, double scale) const override {
    const Grid& g = f_.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += f_[i] * std::tanh((g.point(i)[axis] - offset) / scale);
    return s * g.cell_volume();
  }

 private:
  const Field& f_;
};

class PointPairing final : public Pairing {
 public:
  PointPairing(std::span<const Point> x, int dim) : x_(x), dim_(dim) {
    if (dim == 1) {
      sorted_.reserve(x.size());
      for (const auto& p : x) sorted_.push_back(p[0]);
      std::sort(sorted_.begin(), sorted_.end());
      prefix_.assign(sorted_.size() + 1, 0.0);
      for (std::size_t i = 0; i < sorted_.size(); ++i) prefix_[i + 1] = prefix_[i] + sorted_[i];
    }
  }

  double hat_at(const Point& c) const override {
    const double n = static_cast<double>(x_.size());
    if (dim_ == 1) {
      // sum over (c-1, c] of (1 - c + x) plus over (c, c+1) of (1 + c - x)
      const auto idx = [&](double v, bool upper) {
        return static_cast<std::size_t>(
            (upper ? std::upper_bound(sorted_.begin(), sorted_.end(), v) : std::lower_bound(sorted_.begin(), sorted_.end(), v)) -
            sorted_.begin());
      };
      const double c0 = c[0];
      const std::size_t a = idx(c0 - kHatRadius, true), b = idx(c0, true), e = idx(c0 + kHatRadius, false);
      const double left = (b - a) * (1.0 - c0) + (prefix_[b] - prefix_[a]);
      const double right = (e - b) * (1.0 + c0) - (prefix_[e] - prefix_[b]);
      return (left + right) / n;
    }
    double s = 0.0;
    for (const auto& p : x_) s += hat(norm({p[0] - c[0], p[1] - c[1]}, dim_));
    return s / n;
  }

  double ramp(int axis, double offset, double scale) const override {
    double s = 0.0;
    for (const auto& p : x_) s += std::tanh((p[axis] - offset) / scale);
    return s / static_cast<double>(x_.size());
  }

 private:
  std::span<const Point> x_;
  int dim_;
  std::vector<double> sorted_;
  std::vector<double> prefix_;
};

double dictionary_distance(const Pairing& mu, const Pairing& nu, const Grid& g) {
  const int stride = g.dim() == 1 ? 1 : std::max(1, g.n() / 32);
  double best = 0.0;
  for (int k0 = 0; k0 < g.n(); k0 += stride) {
    for (int k1 = 0; k1 < (g.dim() == 2 ? g.n() : 1); k1 += stride) {
      const Point c{g.node(k0), g.dim() == 2 ? g.node(k1) : 0.0};
      best = std::max(best, std::abs(mu.hat_at(c) - nu.hat_at(c)));
    }
  }
  const double L = g.half_width();
  for (int a = 0; a < g.dim(); ++a) {
    for (int j = 0; j < kRampOffsets; ++j) {
      const double offset = -L + (j + 0.5) * (2.0 * L / kRampOffsets);
      for (double s : kRampScales) best = std::max(best, std::abs(mu.ramp(a, offset, s) - nu.ramp(a, offset, s)));
    }
  }
  return best;
}

std::vector<double> first_coordinates(std::span<const Point> x) {
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& p : x) out.push_back(p[0]);
  return out;
}

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

std::string format_label(std::string_view stem, std::int64_t N, int seed) {
  std::ostringstream s;
  s << stem << "-N" << N << "-seed" << seed;
  return s.str();
}

void require_converged_shape(const MfgSolution& sol) {
  if (sol.p.frames.empty() || sol.alpha_star.frames.size() != sol.p.frames.size()) {
    throw ConfigError("solution has no density or feedback frames");
  }
}

}  // namespace

CostEstimate estimate_cost(std::span<const CostSample> samples) {
  CostEstimate e;
  e.n_samples = static_cast<std::int64_t>(samples.size());
  if (samples.empty()) return e;
  const double n = static_cast<double>(samples.size());
  for (const auto& s : samples) {
    e.energy += s.energy;
    e.running += s.running;
    e.terminal += s.terminal;
  }
  e.energy /= n;
  e.running /= n;
  e.terminal /= n;
  e.mean = e.energy + e.running + e.terminal;
  if (samples.size() >= 2) {
    double ss = 0.0;
    for (const auto& s : samples) ss += (s.total() - e.mean) * (s.total() - e.mean);
    e.std_error = std::sqrt(ss / (n - 1.0) / n);
    e.has_std_error = true;
  }
  return e;
}

namespace {

template <class PositionAt>
CostSample left_rectangle_cost(const TrackedPath& path, const ModelSpec& m, int steps, double dt, PositionAt pos) {
  CostSample c;
  for (int k = 0; k < steps; ++k) {
    const Point& a = path.control[k];
    c.energy += 0.5 * (a[0] * a[0] + a[1] * a[1]) * dt;
    if (!m.running_cost_is_zero) c.running += m.running_cost(pos(k), path.density[k]) * dt;
  }
  c.terminal = m.terminal_cost(pos(steps));
  return c;
}

}  // namespace

CostSample player_cost(const ParticleEnsemble& ens, const ModelSpec& m, std::int64_t player) {
  return left_rectangle_cost(ens.tracked_path(player), m, ens.steps(), ens.dt(),
                             [&](int k) -> const Point& { return ens.position(k, player); });
}

CostSample player_cost(const PlayerPath& path, const ModelSpec& m) {
  return left_rectangle_cost(path.tracked, m, static_cast<int>(path.positions.size()) - 1, path.dt(),
                             [&](int k) -> const Point& { return path.positions[k]; });
}

CostEstimate cost_nplayer(const ModelSpec& m, const Grid& grid, const SimConfig& base, const Profile& profile,
                          std::int64_t player, int replications, std::uint64_t root_seed) {
  if (replications < 1) throw ConfigError("cost_nplayer needs at least one replication");
  SimConfig cfg = base;
  if (std::find(cfg.tracked.begin(), cfg.tracked.end(), player) == cfg.tracked.end()) cfg.tracked.push_back(player);
  std::vector<CostSample> samples;
  for (int r = 0; r < replications; ++r) {
    cfg.seed = derive_seed(root_seed, "rep" + std::to_string(r));
    samples.push_back(player_cost(simulate(m, grid, cfg, profile), m, player));
  }
  return estimate_cost(samples);
}

std::vector<CostSample> cost_limit_samples(const ModelSpec& m, const Feedback& alpha, const FieldFlow& density,
                                           int paths, int steps, std::uint64_t seed) {
  if (paths < 1 || steps < 1) throw ConfigError("cost_limit needs positive paths and steps");
  const GridSampler sampler(density.frames.front());
  const Philox4x32 rng(seed);
  const double dt = m.horizon / steps;
  const double sqrt_dt = std::sqrt(dt);
  std::vector<CostSample> samples(paths);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < paths; ++i) {
    const auto w = rng(draw_counter(0, static_cast<std::uint64_t>(i), DrawPurpose::initial_position));
    Point x = sampler(uniform_open(w[0], 0), uniform_open(w[1], 0), uniform_open(w[2], 0), uniform_open(w[3], 0));
    CostSample c;
    for (int k = 0; k < steps; ++k) {
      const double t = k * dt;
      const Point a = alpha(t, x);
      const double rho = std::max(0.0, interpolate(density.frames[density.frame_at(t)], x));
      c.energy += 0.5 * (a[0] * a[0] + a[1] * a[1]) * dt;
      if (!m.running_cost_is_zero) c.running += m.running_cost(x, rho) * dt;
      Point b{0.0, 0.0};
      if (!m.drift_is_zero) b = m.drift(x, rho);
      const auto xi = normal_pair(rng(draw_counter(k, static_cast<std::uint64_t>(i), DrawPurpose::step_noise)));
      for (int d = 0; d < m.dim; ++d) x[d] += dt * (a[d] + b[d]) + sqrt_dt * xi[d];
    }
    c.terminal = m.terminal_cost(x);
    samples[i] = c;
  }
  return samples;
}

CostEstimate cost_limit(const ModelSpec& m, const Feedback& alpha, const FieldFlow& density, int paths, int steps,
                        std::uint64_t seed) {
  return estimate_cost(cost_limit_samples(m, alpha, density, paths, steps, seed));
}

CostEstimate estimate_difference(std::span<const CostSample> a, std::span<const CostSample> b) {
  if (a.size() != b.size()) throw ConfigError("estimate_difference needs paired samples");
  std::vector<CostSample> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    d[i] = {a[i].energy - b[i].energy, a[i].running - b[i].running, a[i].terminal - b[i].terminal};
  }
  return estimate_cost(d);
}

CostEstimate cost_limit(const ModelSpec& m, const MfgSolution& sol, int paths, int steps, std::uint64_t seed) {
  require_converged_shape(sol);
  return cost_limit(m, Feedback(std::make_shared<VectorFlow>(sol.alpha_star)), sol.p, paths, steps, seed);
}

double dw_proxy(const Field& mu, const Field& nu) {
  require_same_grid(mu.grid(), nu.grid(), "dw_proxy");
  return dictionary_distance(DensityPairing(mu), DensityPairing(nu), nu.grid());
}

double dw_proxy(std::span<const Point> samples, const Field& nu) {
  if (samples.empty()) throw ConfigError("dw_proxy needs at least one sample");
  return dictionary_distance(PointPairing(samples, nu.grid().dim()), DensityPairing(nu), nu.grid());
}

double dw_proxy(std::span<const Point> a, std::span<const Point> b, const Grid& dictionary) {
  if (a.empty() || b.empty()) throw ConfigError("dw_proxy needs at least one sample per measure");
  return dictionary_distance(PointPairing(a, dictionary.dim()), PointPairing(b, dictionary.dim()), dictionary);
}

double w1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ConfigError("w1 needs nonempty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double area = 0.0;
  double cur = std::min(x.front(), y.front());
  while (i < x.size() || j < y.size()) {
    double next;
    if (j >= y.size() || (i < x.size() && x[i] <= y[j])) {
      next = x[i];
    } else {
      next = y[j];
    }
    area += std::abs(i / na - j / nb) * (next - cur);
    cur = next;
    while (i < x.size() && x[i] == cur) ++i;
    while (j < y.size() && y[j] == cur) ++j;
  }
  return area;
}

double w1(std::span<const double> samples, const Field& density) {
  const Grid& g = density.grid();
  if (g.dim() != 1) throw ConfigError("w1 against a density is one-dimensional");
  if (samples.empty()) throw ConfigError("w1 needs nonempty samples");
  const int n = g.n();
  const double h = g.h();
  std::vector<double> cum(n + 1, 0.0);
  for (int k = 0; k < n; ++k) cum[k + 1] = cum[k] + std::max(0.0, density[k]) * h;
  const double total = cum[n];
  if (!(total > 0.0)) throw NumericalError("w1: density has zero mass");
  const double left = g.node(0) - 0.5 * h;
  auto cdf = [&](double x) {
    const double s = (x - left) / h;
    if (s <= 0.0) return 0.0;
    if (s >= n) return 1.0;
    const int k = std::min(n - 1, static_cast<int>(s));
    return (cum[k] + std::max(0.0, density[k]) * h * (s - k)) / total;
  };

  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  std::vector<double> pts = x;
  for (int k = 0; k <= n; ++k) pts.push_back(left + k * h);
  std::sort(pts.begin(), pts.end());
  const double N = static_cast<double>(x.size());
  double area = 0.0;
  std::size_t below = 0;  // samples <= current left breakpoint
  for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
    const double xl = pts[p], xr = pts[p + 1];
    while (below < x.size() && x[below] <= xl) ++below;
    if (xr <= xl) continue;
    const double c = below / N;
    const double a = c - cdf(xl), b = c - cdf(xr);
    const double len = xr - xl;
    if (a * b >= 0.0) {
      area += 0.5 * (std::abs(a) + std::abs(b)) * len;
    } else {
      area += len * (a * a + b * b) / (2.0 * (std::abs(a) + std::abs(b)));
    }
  }
  return area;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("spearman needs two aligned series of length >= 2");
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double median(std::vector<double> v) {
  if (v.empty()) throw ConfigError("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ConvergenceReport convergence_study(const ModelSpec& m, const MfgSolution& sol, const Grid& density_grid,
                                    const ConvergenceOptions& opt) {
  require_converged_shape(sol);
  const int M = sol.p.steps();
  if (opt.sim.steps % M != 0) throw ConfigError("simulation steps must be a multiple of the solver steps");
  if (opt.seeds_per_N < 1) throw ConfigError("seeds_per_N must be >= 1");
  const int stride = opt.sim.steps / M;
  const Grid& solver_grid = sol.p.frames.front().grid();
  const Profile profile{Feedback(std::make_shared<VectorFlow>(sol.alpha_star)), std::nullopt, {}};

  ConvergenceReport report;
  report.N_values = opt.N_values;
  report.holder_gamma = opt.holder_gamma;
  for (const auto N : opt.N_values) {
    std::vector<ConvergenceRow> rows;
    for (int s = 0; s < opt.seeds_per_N; ++s) {
      SimConfig cfg = opt.sim;
      cfg.particles = N;
      cfg.seed = derive_seed(opt.root_seed, format_label("sim", N, s));
      const ParticleEnsemble ens = simulate(m, solver_grid, cfg, profile);
      const EmpiricalDensity dens = empirical_density(ens, m, density_grid, stride);
      ConvergenceRow row{N, s, cfg.seed, 0.0, 0.0, 0.0, 0.0, ens.escaped};
      for (int f = 0; f <= M; ++f) {
        const Field& pn = dens.frames.frames[f];
        const Field& p = sol.p.frames[f];
        const auto x = ens.positions(dens.steps[f]);
        row.sup_density_gap = std::max(row.sup_density_gap, sup_distance(resample(pn, solver_grid), p));
        row.dw_proxy = std::max(row.dw_proxy, dw_proxy(x, p));
        if (m.dim == 1) row.w1 = std::max(row.w1, w1(first_coordinates(x), p));
        row.holder_norm = std::max(row.holder_norm, holder_norm(pn, opt.holder_gamma, opt.holder_window));
      }
      rows.push_back(row);
    }
    ConvergenceSummary sum{N, 0.0, 0.0, 0.0, 0.0};
    auto med = [&](auto member) {
      std::vector<double> v;
      for (const auto& r : rows) v.push_back(r.*member);
      return median(v);
    };
    sum.sup_density_gap = med(&ConvergenceRow::sup_density_gap);
    sum.dw_proxy = med(&ConvergenceRow::dw_proxy);
    sum.w1 = med(&ConvergenceRow::w1);
    sum.holder_norm = med(&ConvergenceRow::holder_norm);
    report.summary.push_back(sum);
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  }
  return report;
}

std::vector<Candidate> default_candidates(std::shared_ptr<const VectorFlow> alpha_star) {
  std::vector<Candidate> c;
  c.push_back({"zero", Feedback{}});
  c.push_back({"0.5*alpha*", Feedback(alpha_star, 0.5, {}, "0.5*alpha*")});
  c.push_back({"1.5*alpha*", Feedback(alpha_star, 1.5, {}, "1.5*alpha*")});
  for (double s : {0.25, -0.25, 0.5, -0.5}) {
    std::ostringstream label;
    label << "alpha*" << (s > 0 ? "+" : "") << s << "e1";
    c.push_back({label.str(), Feedback(alpha_star, 1.0, {s, 0.0}, label.str())});
  }
  c.push_back({"+0.5e1", Feedback::constant({0.5, 0.0}, "+0.5e1")});
  c.push_back({"-0.5e1", Feedback::constant({-0.5, 0.0}, "-0.5e1")});
  return c;
}

double default_admissibility_bound(double k_bound) { return 1.5 * k_bound + 0.5; }

NashGapReport nash_gap_study(const ModelSpec& m, const MfgSolution& sol, const std::vector<Candidate>& candidates,
                             const NashOptions& opt) {
  require_converged_shape(sol);
  if (candidates.empty()) throw ConfigError("nash_gap_study needs at least one candidate deviation");
  if (opt.seeds_per_N < 1 || opt.replications < 1) throw ConfigError("seeds_per_N and replications must be >= 1");
  NashGapReport report;
  report.N_values = opt.N_values;
  report.admissibility_bound = opt.admissibility_bound.value_or(default_admissibility_bound(sol.k_bound));
  for (const auto& c : candidates) {
    const double s = c.feedback.sup_norm();
    if (s > report.admissibility_bound * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "candidate '" << c.label << "' has sup norm " << s << " above the admissibility bound "
          << report.admissibility_bound;
      throw ConfigError(msg.str());
    }
    report.candidates.push_back(c.label);
  }

  const Grid& grid = sol.p.frames.front().grid();
  const Profile equilibrium{Feedback(std::make_shared<VectorFlow>(sol.alpha_star)), std::nullopt, {}};
  const bool can_replay = m.drift_is_zero || !m.drift_depends_on_density;
  std::vector<double> gaps;
  for (const auto N : opt.N_values) {
    std::vector<CostSample> pooled_eq;
    std::vector<std::vector<CostSample>> pooled_dev(candidates.size());
    std::vector<double> seed_gaps;
    for (int s = 0; s < opt.seeds_per_N; ++s) {
      std::vector<CostSample> eq;
      std::vector<std::vector<CostSample>> dev(candidates.size());
      for (int r = 0; r < opt.replications; ++r) {
        SimConfig cfg = opt.sim;
        cfg.particles = N;
        cfg.tracked = {0};
        cfg.seed = derive_seed(opt.root_seed, format_label("nash", N, s) + "-rep" + std::to_string(r));
        const ParticleEnsemble base = simulate(m, grid, cfg, equilibrium);
        eq.push_back(player_cost(base, m, 0));
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          const Profile deviate{equilibrium.shared, std::int64_t{0}, candidates[c].feedback};
          dev[c].push_back(can_replay ? player_cost(replay_path(m, base, cfg, deviate, 0), m)
                                      : player_cost(simulate(m, grid, cfg, deviate), m, 0));
        }
      }
      NashSeedResult row;
      row.N = N;
      row.seed_index = s;
      row.equilibrium = estimate_cost(eq);
      std::size_t best = 0;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        row.deviations.push_back(estimate_cost(dev[c]));
        if (row.deviations[c].mean < row.deviations[best].mean) best = c;
        pooled_dev[c].insert(pooled_dev[c].end(), dev[c].begin(), dev[c].end());
      }
      row.candidate_gap = row.equilibrium.mean - row.deviations[best].mean;
      row.winner = candidates[best].label;
      seed_gaps.push_back(row.candidate_gap);
      pooled_eq.insert(pooled_eq.end(), eq.begin(), eq.end());
      report.rows.push_back(std::move(row));
    }
    NashSummary sum;
    sum.N = N;
    sum.equilibrium = estimate_cost(pooled_eq);
    std::size_t best = 0;
    std::vector<CostEstimate> est;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      est.push_back(estimate_cost(pooled_dev[c]));
      if (est[c].mean < est[best].mean) best = c;
    }
    sum.best_deviation = est[best];
    sum.deviation_winner = candidates[best].label;
    sum.candidate_gap = median(seed_gaps);
    sum.combined_std_error = std::hypot(sum.equilibrium.std_error, sum.best_deviation.std_error);
    gaps.push_back(sum.candidate_gap);
    report.summary.push_back(std::move(sum));
  }
  if (opt.N_values.size() >= 2) {
    std::vector<double> ns(opt.N_values.begin(), opt.N_values.end());
    report.spearman_gap_vs_N = spearman(ns, gaps);
  }
  return report;
}

void write_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "N,seed,metric,value\n" << std::setprecision(17);
  for (const auto& r : report.rows) {
    out << r.N << ',' << r.seed_index << ",sup_density_gap," << r.sup_density_gap << '\n';
    out << r.N << ',' << r.seed_index << ",dw_proxy," << r.dw_proxy << '\n';
    out << r.N << ',' << r.seed_index << ",w1," << r.w1 << '\n';
    out << r.N << ',' << r.seed_index << ",holder_norm," << r.holder_norm << '\n';
    out << r.N << ',' << r.seed_index << ",escaped," << r.escaped << '\n';
  }
}

void write_csv(std::ostream& out, const NashGapReport& report) {
  out << "N,seed,metric,value\n" << std::setprecision(17);
  for (const auto& r : report.rows) {
    out << r.N << ',' << r.seed_index << ",J_equilibrium," << r.equilibrium.mean << '\n';
    out << r.N << ',' << r.seed_index << ",J_equilibrium_se," << r.equilibrium.std_error << '\n';
    for (std::size_t c = 0; c < r.deviations.size(); ++c) {
      out << r.N << ',' << r.seed_index << ",J_deviation[" << report.candidates[c] << "]," << r.deviations[c].mean
          << '\n';
    }
    out << r.N << ',' << r.seed_index << ",candidate_gap_lower_bound," << r.candidate_gap << '\n';
  }
}

}  // namespace mfg
