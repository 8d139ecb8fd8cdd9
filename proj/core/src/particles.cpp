#include "mfg/particles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfg/errors.hpp"
#include "mfg/rng.hpp"

namespace mfg {

namespace {

inline double squared_distance(const Point& a, const Point& b, int dim) {
  double r2 = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double d = a[k] - b[k];
    r2 += d * d;
  }
  return r2;
}

std::uint64_t stream_of(const SimConfig& cfg, std::int64_t i) {
  return cfg.stream_ids.empty() ? static_cast<std::uint64_t>(i) : cfg.stream_ids[i];
}

void validate(const SimConfig& cfg) {
  if (cfg.particles < 2) throw ConfigError("simulation needs at least 2 particles");
  if (cfg.steps < 1) throw ConfigError("simulation needs at least 1 step");
  if (!cfg.initial_positions.empty() &&
      static_cast<std::int64_t>(cfg.initial_positions.size()) != cfg.particles) {
    throw ConfigError("initial_positions must hold one point per particle");
  }
  if (!cfg.stream_ids.empty() && static_cast<std::int64_t>(cfg.stream_ids.size()) != cfg.particles) {
    throw ConfigError("stream_ids must hold one id per particle");
  }
  for (auto i : cfg.tracked) {
    if (i < 0 || i >= cfg.particles) throw ConfigError("tracked player index out of range");
  }
}

Point advance(const ModelSpec& m, const Feedback& fb, double t, double dt, double sqrt_dt, double noise_scale,
              const Point& x, double rho, const std::array<double, 2>& xi) {
  const Point a = fb(t, x);
  Point b{0.0, 0.0};
  if (!m.drift_is_zero) b = m.drift(x, rho);
  Point out{0.0, 0.0};
  for (int k = 0; k < m.dim; ++k) out[k] = x[k] + dt * (a[k] + b[k]) + sqrt_dt * noise_scale * xi[k];
  return out;
}

[[noreturn]] void throw_non_finite(int step, std::int64_t particle) {
  std::ostringstream msg;
  msg << "non-finite particle position at step " << step << ", particle " << particle;
  throw NumericalError(msg.str());
}

bool finite(const Point& x, int dim) {
  for (int k = 0; k < dim; ++k) {
    if (!std::isfinite(x[k])) return false;
  }
  return true;
}

void fill_tracked(ParticleEnsemble& ens, const ModelSpec& m, const Mollifier& mol, const SimConfig& cfg,
                  const Profile& profile) {
  ens.tracked.clear();
  for (auto i : cfg.tracked) {
    TrackedPath path;
    path.index = i;
    const Feedback& fb = profile.for_player(i);
    for (int k = 0; k <= ens.steps(); ++k) {
      const Point& x = ens.position(k, i);
      path.density.push_back(interaction_at(mol, ens.positions(k), m.dim, x));
      path.control.push_back(fb(ens.t0() + k * ens.dt(), x));
    }
    ens.tracked.push_back(std::move(path));
  }
}

std::int64_t count_escapes(const ParticleEnsemble& ens, const Grid& grid) {
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < ens.particles(); ++i) {
    for (int k = 0; k <= ens.steps(); ++k) {
      if (!grid.contains(ens.position(k, i))) {
        ++count;
        break;
      }
    }
  }
  return count;
}

}  // namespace

Feedback::Feedback(std::shared_ptr<const VectorFlow> flow, double scale, Point shift, std::string label)
    : flow_(std::move(flow)), scale_(scale), shift_(shift), label_(std::move(label)) {}

Feedback Feedback::constant(const Point& value, std::string label) {
  Feedback f;
  f.shift_ = value;
  f.label_ = std::move(label);
  return f;
}

Point Feedback::operator()(double t, const Point& x) const {
  if (!flow_) return shift_;
  const Point a = interpolate(flow_->frames[flow_->frame_at(t)], x);
  return {scale_ * a[0] + shift_[0], scale_ * a[1] + shift_[1]};
}

double Feedback::sup_norm() const {
  if (!flow_) return std::hypot(shift_[0], shift_[1]);
  double m = 0.0;
  for (const auto& frame : flow_->frames) {
    for (std::size_t i = 0; i < frame.grid().size(); ++i) {
      const Point a = frame.at(i);
      m = std::max(m, std::hypot(scale_ * a[0] + shift_[0], scale_ * a[1] + shift_[1]));
    }
  }
  return m;
}

std::string Profile::label() const {
  if (!deviator) return "all:" + shared.label();
  return "all:" + shared.label() + ",player" + std::to_string(*deviator) + ":" + deviation.label();
}

ParticleEnsemble::ParticleEnsemble(int dim, std::int64_t particles, int steps, double t0, double t1)
    : dim_(dim),
      particles_(particles),
      steps_(steps),
      t0_(t0),
      t1_(t1),
      positions_(static_cast<std::size_t>(particles) * (steps + 1), Point{0.0, 0.0}) {}

std::span<const Point> ParticleEnsemble::positions(int step) const {
  return {positions_.data() + static_cast<std::size_t>(step) * particles_, static_cast<std::size_t>(particles_)};
}

std::span<Point> ParticleEnsemble::positions(int step) {
  return {positions_.data() + static_cast<std::size_t>(step) * particles_, static_cast<std::size_t>(particles_)};
}

const TrackedPath& ParticleEnsemble::tracked_path(std::int64_t player) const {
  for (const auto& p : tracked) {
    if (p.index == player) return p;
  }
  throw ConfigError("player " + std::to_string(player) + " was not tracked during simulation");
}

TrajectoryDump ParticleEnsemble::dump() const {
  TrajectoryDump d;
  d.particles = static_cast<std::uint32_t>(particles_);
  d.steps = static_cast<std::uint32_t>(steps_);
  d.dim = static_cast<std::uint32_t>(dim_);
  d.positions.reserve(static_cast<std::size_t>(particles_) * (steps_ + 1) * dim_);
  for (std::int64_t i = 0; i < particles_; ++i) {
    for (int k = 0; k <= steps_; ++k) {
      for (int a = 0; a < dim_; ++a) d.positions.push_back(position(k, i)[a]);
    }
  }
  return d;
}

std::vector<double> interaction_direct(const Mollifier& kernel, std::span<const Point> x, int dim) {
  const std::size_t n = x.size();
  std::vector<double> rho(n);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += kernel.from_squared_distance(squared_distance(x[i], x[j], dim));
    rho[i] = s / static_cast<double>(n);
  }
  return rho;
}

double interaction_at(const Mollifier& kernel, std::span<const Point> x, int dim, const Point& y) {
  double s = 0.0;
  for (const auto& xj : x) s += kernel.from_squared_distance(squared_distance(y, xj, dim));
  return s / static_cast<double>(x.size());
}

std::vector<double> interaction_cell_list(const Mollifier& kernel, std::span<const Point> x, int dim,
                                          double cell_size) {
  const std::size_t n = x.size();
  // Cells slightly wider than the support so rounding in the cell index can
  // never separate two points closer than the support radius by two cells.
  const double cell = std::max(cell_size, kernel.support_radius()) * (1.0 + 1e-9);

  struct Entry {
    std::int64_t c0, c1;
    std::size_t index;
    auto operator<=>(const Entry&) const = default;
  };
  std::vector<Entry> entries(n);
  for (std::size_t i = 0; i < n; ++i) {
    entries[i] = {static_cast<std::int64_t>(std::floor(x[i][0] / cell)),
                  dim == 2 ? static_cast<std::int64_t>(std::floor(x[i][1] / cell)) : 0, i};
  }
  std::vector<Entry> sorted = entries;
  std::sort(sorted.begin(), sorted.end());

  // Contiguous ranges of equal cells.
  struct Range {
    std::int64_t c0, c1;
    std::size_t begin, end;
  };
  std::vector<Range> cells;
  for (std::size_t s = 0; s < n;) {
    std::size_t e = s;
    while (e < n && sorted[e].c0 == sorted[s].c0 && sorted[e].c1 == sorted[s].c1) ++e;
    cells.push_back({sorted[s].c0, sorted[s].c1, s, e});
    s = e;
  }
  // Few cells means near-global interaction: the direct sum is as cheap.
  if (cells.size() < 4) return interaction_direct(kernel, x, dim);

  auto find_cell = [&](std::int64_t c0, std::int64_t c1) -> const Range* {
    auto it = std::lower_bound(cells.begin(), cells.end(), std::pair{c0, c1}, [](const Range& r, const auto& key) {
      return std::pair{r.c0, r.c1} < key;
    });
    if (it == cells.end() || it->c0 != c0 || it->c1 != c1) return nullptr;
    return &*it;
  };

  std::vector<double> rho(n);
  const int reach1 = dim == 2 ? 1 : 0;
  const std::int64_t ncells = static_cast<std::int64_t>(cells.size());
  // Every particle of a cell sees the same neighbourhood, so the candidate
  // list is built once per cell in ascending particle index (the order of
  // the direct sum, which keeps the two bitwise equal).
#pragma omp parallel
  {
    std::vector<std::size_t> near;
    std::vector<Point> near_x;
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t c = 0; c < ncells; ++c) {
      const Range& home = cells[c];
      near.clear();
      for (int d0 = -1; d0 <= 1; ++d0) {
        for (int d1 = -reach1; d1 <= reach1; ++d1) {
          if (const Range* r = find_cell(home.c0 + d0, home.c1 + d1)) {
            for (std::size_t s = r->begin; s < r->end; ++s) near.push_back(sorted[s].index);
          }
        }
      }
      std::sort(near.begin(), near.end());
      near_x.resize(near.size());
      for (std::size_t q = 0; q < near.size(); ++q) near_x[q] = x[near[q]];
      for (std::size_t s = home.begin; s < home.end; ++s) {
        const std::size_t i = sorted[s].index;
        double acc = 0.0;
        for (const Point& y : near_x) acc += kernel.from_squared_distance(squared_distance(x[i], y, dim));
        rho[i] = acc / static_cast<double>(n);
      }
    }
  }
  return rho;
}

GridSampler::GridSampler(const Field& density) : grid_(density.grid()) {
  const int n = grid_.n();
  const std::size_t size = grid_.size();
  for (std::size_t i = 0; i < size; ++i) {
    if (!(density[i] >= 0.0) || !std::isfinite(density[i])) {
      throw NumericalError("sampling density must be finite and nonnegative");
    }
  }
  marginal_.assign(n, 0.0);
  double total = 0.0;
  if (grid_.dim() == 1) {
    for (int k = 0; k < n; ++k) marginal_[k] = (total += density[k]);
  } else {
    conditional_.assign(size, 0.0);
    for (int k0 = 0; k0 < n; ++k0) {
      double row = 0.0;
      for (int k1 = 0; k1 < n; ++k1) conditional_[grid_.flat_index(k0, k1)] = (row += density[grid_.flat_index(k0, k1)]);
      marginal_[k0] = (total += row);
    }
  }
  if (!(total > 0.0)) throw NumericalError("sampling density has zero mass");
}

Point GridSampler::operator()(double u0, double u1, double u2, double u3) const {
  const int n = grid_.n();
  const double h = grid_.h();
  auto pick = [](std::span<const double> cdf, double u) {
    const double target = u * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
  };
  const int k0 = pick(marginal_, u0);
  Point x{grid_.node(k0) + (u2 - 0.5) * h, 0.0};
  if (grid_.dim() == 2) {
    const std::span<const double> row(conditional_.data() + static_cast<std::size_t>(k0) * n, n);
    const int k1 = pick(row, u1);
    x[1] = grid_.node(k1) + (u3 - 0.5) * h;
  }
  return x;
}

ParticleEnsemble simulate(const ModelSpec& m, const Grid& grid, const SimConfig& cfg, const Profile& profile) {
  validate(cfg);
  if (grid.dim() != m.dim) throw ConfigError("grid and model dimensions differ");
  const int dim = m.dim;
  const std::int64_t N = cfg.particles;
  ParticleEnsemble ens(dim, N, cfg.steps, 0.0, m.horizon);
  ens.deviator = profile.deviator;
  ens.profile = profile.label();
  const Mollifier mol = mollifier_for(m, N);
  const Philox4x32 rng(cfg.seed);

  if (cfg.initial_positions.empty()) {
    const GridSampler sampler(initial_density_field(m, grid));
    auto x0 = ens.positions(0);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < N; ++i) {
      const auto w = rng(draw_counter(0, stream_of(cfg, i), DrawPurpose::initial_position));
      x0[i] = sampler(uniform_open(w[0], 0), uniform_open(w[1], 0), uniform_open(w[2], 0), uniform_open(w[3], 0));
    }
  } else {
    std::copy(cfg.initial_positions.begin(), cfg.initial_positions.end(), ens.positions(0).begin());
  }

  const double dt = ens.dt();
  const double sqrt_dt = std::sqrt(dt);
  const bool needs_density = !m.drift_is_zero && m.drift_depends_on_density;
  std::vector<double> rho(N, 0.0);
  for (int k = 0; k < cfg.steps; ++k) {
    const auto cur = ens.positions(k);
    auto next = ens.positions(k + 1);
    if (needs_density) rho = interaction_cell_list(mol, cur, dim, cfg.cell_size);
    const double t = ens.t0() + k * dt;
    std::int64_t bad = -1;
#pragma omp parallel for schedule(static) reduction(max : bad)
    for (std::int64_t i = 0; i < N; ++i) {
      const auto xi = normal_pair(rng(draw_counter(k, stream_of(cfg, i), DrawPurpose::step_noise)));
      next[i] = advance(m, profile.for_player(i), t, dt, sqrt_dt, cfg.noise_scale, cur[i], rho[i], xi);
      if (!finite(next[i], dim)) bad = std::max(bad, i);
    }
    if (bad >= 0) throw_non_finite(k + 1, bad);
  }
  fill_tracked(ens, m, mol, cfg, profile);
  ens.escaped = count_escapes(ens, grid);
  return ens;
}

PlayerPath replay_path(const ModelSpec& m, const ParticleEnsemble& environment, const SimConfig& cfg,
                       const Profile& profile, std::int64_t player) {
  validate(cfg);
  if (!m.drift_is_zero && m.drift_depends_on_density) {
    throw ConfigError("replaying a player requires a drift that does not depend on the density");
  }
  if (environment.particles() != cfg.particles || environment.steps() != cfg.steps) {
    throw ConfigError("replay: environment does not match the simulation config");
  }
  if (player < 0 || player >= cfg.particles) throw ConfigError("replay: player index out of range");
  const Mollifier mol = mollifier_for(m, cfg.particles);
  const Philox4x32 rng(cfg.seed);
  const double dt = environment.dt();
  const double sqrt_dt = std::sqrt(dt);
  const Feedback& fb = profile.for_player(player);

  PlayerPath path;
  path.index = player;
  path.t0 = environment.t0();
  path.t1 = environment.t1();
  path.tracked.index = player;
  path.positions.push_back(environment.position(0, player));
  for (int k = 0;; ++k) {
    const Point x = path.positions.back();
    const double t = environment.t0() + k * dt;
    // Same ascending-index sum as interaction_at, with this player's entry replaced.
    const auto others = environment.positions(k);
    double s = 0.0;
    for (std::int64_t j = 0; j < cfg.particles; ++j) {
      s += mol.from_squared_distance(squared_distance(x, j == player ? x : others[j], m.dim));
    }
    path.tracked.density.push_back(s / static_cast<double>(cfg.particles));
    path.tracked.control.push_back(fb(t, x));
    if (k == cfg.steps) break;
    const auto xi = normal_pair(rng(draw_counter(k, stream_of(cfg, player), DrawPurpose::step_noise)));
    const Point y = advance(m, fb, t, dt, sqrt_dt, cfg.noise_scale, x, 0.0, xi);
    if (!finite(y, m.dim)) throw_non_finite(k + 1, player);
    path.positions.push_back(y);
  }
  return path;
}

ParticleEnsemble replay_player(const ModelSpec& m, const ParticleEnsemble& environment, const Grid& grid,
                               const SimConfig& cfg, const Profile& profile, std::int64_t player) {
  const PlayerPath path = replay_path(m, environment, cfg, profile, player);
  ParticleEnsemble ens = environment;
  ens.deviator = profile.deviator;
  ens.profile = profile.label();
  for (int k = 0; k <= cfg.steps; ++k) ens.positions(k)[player] = path.positions[k];
  fill_tracked(ens, m, mollifier_for(m, cfg.particles), cfg, profile);
  ens.escaped = count_escapes(ens, grid);
  return ens;
}

EmpiricalDensity empirical_density(const ParticleEnsemble& ens, const ModelSpec& m, const Grid& grid,
                                   int frame_stride) {
  if (grid.dim() != ens.dim()) throw ConfigError("grid and ensemble dimensions differ");
  if (frame_stride < 1 || ens.steps() % frame_stride != 0) {
    throw ConfigError("frame_stride must be a positive divisor of the simulation steps");
  }
  const Mollifier mol = mollifier_for(m, ens.particles());
  const double eps = mol.support_radius();
  const double h = grid.h();
  if (eps < 4.0 * h) {
    std::ostringstream msg;
    msg << "density grid resolves the mollifier scale " << eps << " with " << eps / h
        << " nodes; at least 4 are required (increase grid.n)";
    throw ConfigError(msg.str());
  }
  const int frames = ens.steps() / frame_stride;
  EmpiricalDensity out{grid, FieldFlow{ens.t0(), ens.t1(), std::vector<Field>(frames + 1, Field(grid))}, {}};
  for (int f = 0; f <= frames; ++f) out.steps.push_back(f * frame_stride);

  const int n = grid.n();
  const double L = grid.half_width();
  const int dim = grid.dim();
  const double inv_n = 1.0 / static_cast<double>(ens.particles());
#pragma omp parallel for schedule(dynamic)
  for (int f = 0; f <= frames; ++f) {
    Field& frame = out.frames.frames[f];
    std::vector<double> w;
    for (const Point& x : ens.positions(out.steps[f])) {
      // Lattice node range within the support, ignoring the box.
      std::array<std::int64_t, 2> lo{0, 0}, hi{0, 0};
      for (int a = 0; a < dim; ++a) {
        lo[a] = static_cast<std::int64_t>(std::ceil((x[a] - eps + L) / h));
        hi[a] = static_cast<std::int64_t>(std::floor((x[a] + eps + L) / h));
      }
      w.clear();
      double mass = 0.0;
      for (std::int64_t k0 = lo[0]; k0 <= hi[0]; ++k0) {
        for (std::int64_t k1 = lo[1]; k1 <= hi[1]; ++k1) {
          const Point y{-L + k0 * h, dim == 2 ? -L + k1 * h : 0.0};
          const double v = mol.from_squared_distance(squared_distance(y, x, dim));
          w.push_back(v);
          mass += v;
        }
      }
      if (!(mass > 0.0)) continue;
      const double scale = inv_n / (mass * grid.cell_volume());
      std::size_t idx = 0;
      for (std::int64_t k0 = lo[0]; k0 <= hi[0]; ++k0) {
        for (std::int64_t k1 = lo[1]; k1 <= hi[1]; ++k1, ++idx) {
          if (k0 < 0 || k0 >= n || k1 < 0 || k1 >= n) continue;
          frame[grid.flat_index(static_cast<int>(k0), static_cast<int>(k1))] += w[idx] * scale;
        }
      }
    }
  }
  return out;
}

}  // namespace mfg
