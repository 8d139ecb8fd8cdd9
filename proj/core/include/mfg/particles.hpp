#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfg/field.hpp"
#include "mfg/field_io.hpp"
#include "mfg/model.hpp"

namespace mfg {

/// Per-player feedback x -> scale * alpha(t, x) + shift, where alpha is an
/// optional flow (absent means zero). Space: clamped multilinear
/// interpolation; time: left-constant on the flow's ladder.
class Feedback {
 public:
  Feedback() = default;
  explicit Feedback(std::shared_ptr<const VectorFlow> flow, double scale = 1.0, Point shift = {},
                    std::string label = "alpha*");
  static Feedback constant(const Point& value, std::string label);

  Point operator()(double t, const Point& x) const;
  /// sup over frames and nodes of |scale * alpha + shift| (|shift| without a flow).
  double sup_norm() const;
  const std::string& label() const { return label_; }
  double scale() const { return scale_; }
  const Point& shift() const { return shift_; }
  const VectorFlow* flow() const { return flow_.get(); }

 private:
  std::shared_ptr<const VectorFlow> flow_;
  double scale_ = 1.0;
  Point shift_{0.0, 0.0};
  std::string label_ = "zero";
};

/// Everyone plays `shared`, except an optional single deviator.
struct Profile {
  Feedback shared;
  std::optional<std::int64_t> deviator;
  Feedback deviation;

  const Feedback& for_player(std::int64_t i) const {
    return deviator && *deviator == i ? deviation : shared;
  }
  std::string label() const;
};

struct SimConfig {
  std::int64_t particles = 2;
  int steps = 200;
  std::uint64_t seed = 0;
  double cell_size = 0.0;  // <= 0: the mollifier support radius
  // Test hooks.
  double noise_scale = 1.0;
  std::vector<Point> initial_positions;  // empty: sample from p0
  std::vector<std::uint64_t> stream_ids;  // empty: stream i for player i
  // Players whose interaction term and control are cached for cost evaluation.
  std::vector<std::int64_t> tracked;
};

/// Cached per-step data of one player, k = 0..steps.
struct TrackedPath {
  std::int64_t index = 0;
  std::vector<double> density;  // rho_k^i = (1/N) sum_j V^N(X_k^i - X_k^j)
  std::vector<Point> control;   // alpha(t_k, X_k^i)
};

class ParticleEnsemble {
 public:
  ParticleEnsemble(int dim, std::int64_t particles, int steps, double t0, double t1);

  int dim() const { return dim_; }
  std::int64_t particles() const { return particles_; }
  int steps() const { return steps_; }
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  double dt() const { return (t1_ - t0_) / steps_; }

  std::span<const Point> positions(int step) const;
  std::span<Point> positions(int step);
  const Point& position(int step, std::int64_t i) const { return positions_[step * particles_ + i]; }

  std::vector<TrackedPath> tracked;
  std::int64_t escaped = 0;  // players that left the grid box at some step
  std::optional<std::int64_t> deviator;
  std::string profile;

  const TrackedPath& tracked_path(std::int64_t player) const;
  TrajectoryDump dump() const;

 private:
  int dim_;
  std::int64_t particles_;
  int steps_;
  double t0_, t1_;
  std::vector<Point> positions_;  // step-major
};

/// rho_i = (1/N) sum_j V^N(x_i - x_j), j ascending, self term included.
std::vector<double> interaction_direct(const Mollifier& kernel, std::span<const Point> x, int dim);

/// Same sums through a uniform cell list; bitwise equal to interaction_direct
/// because V^N vanishes beyond its support and neighbours are merged in
/// ascending index order.
std::vector<double> interaction_cell_list(const Mollifier& kernel, std::span<const Point> x, int dim,
                                          double cell_size = 0.0);

/// (1/N) sum_j V^N(y - x_j) with y an arbitrary point.
double interaction_at(const Mollifier& kernel, std::span<const Point> x, int dim, const Point& y);

/// Inverse-CDF sampler for the piecewise-constant density carried by a
/// nonnegative field (node value spread over its cell).
class GridSampler {
 public:
  explicit GridSampler(const Field& density);
  /// Four uniforms in (0,1) -> one point.
  Point operator()(double u0, double u1, double u2, double u3) const;

 private:
  Grid grid_;
  std::vector<double> marginal_;     // cumulative over axis-0 cells
  std::vector<double> conditional_;  // 2D: cumulative along axis 1 for each axis-0 cell
};

/// Euler-Maruyama for the N-player system
///   X_{k+1} = X_k + dt (alpha_i(t_k, X_k) + b(X_k, rho_k)) + sqrt(dt) xi_k.
/// `grid` supplies the initial-density sampler and the box for escape counts.
ParticleEnsemble simulate(const ModelSpec& m, const Grid& grid, const SimConfig& cfg, const Profile& profile);

/// One player's trajectory with its cached interaction values and controls.
struct PlayerPath {
  std::int64_t index = 0;
  double t0 = 0.0, t1 = 0.0;
  std::vector<Point> positions;  // k = 0..steps
  TrackedPath tracked;
  double dt() const { return (t1 - t0) / (static_cast<double>(positions.size()) - 1.0); }
};

/// Re-runs one player's path against the other players' cached positions.
/// Equals the player's path in a full simulation of `profile` when the drift
/// ignores the density (others do not react to the player); throws
/// ConfigError otherwise.
PlayerPath replay_path(const ModelSpec& m, const ParticleEnsemble& environment, const SimConfig& cfg,
                       const Profile& profile, std::int64_t player);

/// replay_path written back into a copy of the environment.
ParticleEnsemble replay_player(const ModelSpec& m, const ParticleEnsemble& environment, const Grid& grid,
                               const SimConfig& cfg, const Profile& profile, std::int64_t player);

struct EmpiricalDensity {
  Grid grid;
  FieldFlow frames;
  std::vector<int> steps;  // simulation step of every frame
};

/// p^N(t_k, x) = (1/N) sum_i V^N(x - X_k^i) at every `frame_stride`-th step.
/// Each particle's sampled kernel is rescaled to discrete mass exactly 1/N
/// on the infinite node lattice, so a frame's mass is 1 up to rounding
/// unless particles sit near the box edge.
EmpiricalDensity empirical_density(const ParticleEnsemble& ens, const ModelSpec& m, const Grid& grid,
                                   int frame_stride);

}  // namespace mfg
