#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfg/field.hpp"
#include "mfg/model.hpp"
#include "mfg/particles.hpp"
#include "mfg/solver.hpp"

namespace mfg {

/// One realisation of a player's cost, split by term.
struct CostSample {
  double energy = 0.0;    // int |alpha|^2 / 2
  double running = 0.0;   // int f(X, rho)
  double terminal = 0.0;  // g(X_T)
  double total() const { return energy + running + terminal; }
};

struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample std / sqrt(n); zero and flagged when n < 2
  bool has_std_error = false;
  std::int64_t n_samples = 0;
  double energy = 0.0;
  double running = 0.0;
  double terminal = 0.0;
};

CostEstimate estimate_cost(std::span<const CostSample> samples);

/// Left-rectangle cost of a tracked player, using the interaction values and
/// controls cached during simulation.
CostSample player_cost(const ParticleEnsemble& ens, const ModelSpec& m, std::int64_t player);
CostSample player_cost(const PlayerPath& path, const ModelSpec& m);

/// Mean cost of `player` over independent ensembles; replication r uses the
/// seed derive_seed(root_seed, "rep{r}").
CostEstimate cost_nplayer(const ModelSpec& m, const Grid& grid, const SimConfig& base, const Profile& profile,
                          std::int64_t player, int replications, std::uint64_t root_seed);

/// Single-agent cost under drift alpha + b(., p(t, .)) and running cost
/// f(., p(t, .)), with X_0 drawn from density.frames[0].
CostEstimate cost_limit(const ModelSpec& m, const Feedback& alpha, const FieldFlow& density, int paths, int steps,
                        std::uint64_t seed);
/// Per-path samples behind cost_limit. Path i draws from counters keyed by i
/// only, so two feedbacks under one seed share their noise.
std::vector<CostSample> cost_limit_samples(const ModelSpec& m, const Feedback& alpha, const FieldFlow& density,
                                           int paths, int steps, std::uint64_t seed);
/// Estimate of the mean of a[i] - b[i] over paired samples.
CostEstimate estimate_difference(std::span<const CostSample> a, std::span<const CostSample> b);
CostEstimate cost_limit(const ModelSpec& m, const MfgSolution& sol, int paths, int steps, std::uint64_t seed);

/// Lower bound of the bounded-Lipschitz distance: the largest |<mu - nu, f>|
/// over a fixed dictionary of 1-Lipschitz functions bounded by 1 (hats of
/// half-width 1 at dictionary nodes, tanh ramps at 16 offsets and scales 1
/// and 2 along each axis). Dictionary nodes are the nodes of the reference
/// grid (every few nodes in 2D).
double dw_proxy(const Field& mu, const Field& nu);
double dw_proxy(std::span<const Point> samples, const Field& nu);
double dw_proxy(std::span<const Point> a, std::span<const Point> b, const Grid& dictionary);

/// Wasserstein-1 in one dimension.
double w1(std::span<const double> a, std::span<const double> b);
/// Against the piecewise-constant density of a 1D field (node value over its cell).
double w1(std::span<const double> samples, const Field& density);

/// Spearman rank correlation; ties get average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> values);

struct ConvergenceRow {
  std::int64_t N = 0;
  int seed_index = 0;
  std::uint64_t seed = 0;
  double sup_density_gap = 0.0;  // max over frames of sup |p^N - p|
  double dw_proxy = 0.0;         // max over frames, empirical measure vs p
  double w1 = 0.0;               // d = 1 only, max over frames
  double holder_norm = 0.0;      // max over frames of ||p^N||_gamma
  std::int64_t escaped = 0;
};

struct ConvergenceSummary {
  std::int64_t N = 0;
  double sup_density_gap = 0.0;  // medians over seeds
  double dw_proxy = 0.0;
  double w1 = 0.0;
  double holder_norm = 0.0;
};

struct ConvergenceReport {
  std::vector<std::int64_t> N_values;
  std::vector<ConvergenceRow> rows;  // sorted by (N, seed_index)
  std::vector<ConvergenceSummary> summary;
  double holder_gamma = 0.4;
};

struct ConvergenceOptions {
  std::vector<std::int64_t> N_values{100, 400, 1600, 6400};
  int seeds_per_N = 8;
  std::uint64_t root_seed = 0;
  SimConfig sim;  // particles and seed are overwritten per run
  double holder_gamma = 0.4;
  int holder_window = 4;
};

/// Simulates the N-player system under the shared feedback alpha* and
/// compares it with the MFG density. `density_grid` carries p^N; it must
/// resolve the mollifier of the largest N. The simulation steps must be a
/// multiple of the solver steps. Run (N, s) uses the seed
/// derive_seed(root_seed, "sim-N{N}-seed{s}").
ConvergenceReport convergence_study(const ModelSpec& m, const MfgSolution& sol, const Grid& density_grid,
                                    const ConvergenceOptions& options);

struct Candidate {
  std::string label;
  Feedback feedback;
};

/// {0, alpha*/2, 3 alpha*/2, alpha* +- 0.25 e1, alpha* +- 0.5 e1, +-0.5 e1}.
std::vector<Candidate> default_candidates(std::shared_ptr<const VectorFlow> alpha_star);

/// Default admissibility bound for deviations: 1.5 K + 0.5, the smallest
/// bound of this form that admits every default candidate.
double default_admissibility_bound(double k_bound);

struct NashSeedResult {
  std::int64_t N = 0;
  int seed_index = 0;
  CostEstimate equilibrium;
  std::vector<CostEstimate> deviations;  // aligned with the candidate list
  double candidate_gap = 0.0;            // J_eq - min deviation mean
  std::string winner;
};

struct NashSummary {
  std::int64_t N = 0;
  CostEstimate equilibrium;     // pooled over seeds
  CostEstimate best_deviation;  // pooled, candidate with the smallest pooled mean
  std::string deviation_winner;
  double candidate_gap = 0.0;   // median over seeds; a lower-bound estimate of the required epsilon
  double combined_std_error = 0.0;
};

struct NashGapReport {
  std::vector<std::int64_t> N_values;
  std::vector<std::string> candidates;
  std::vector<NashSeedResult> rows;
  std::vector<NashSummary> summary;
  double spearman_gap_vs_N = 0.0;
  double admissibility_bound = 0.0;
};

struct NashOptions {
  std::vector<std::int64_t> N_values{100, 400, 1600};
  int seeds_per_N = 8;
  int replications = 50;
  std::uint64_t root_seed = 0;
  SimConfig sim;
  std::optional<double> admissibility_bound;  // default: default_admissibility_bound(k_bound)
};

/// Player 0's cost under the equilibrium profile against its cost when it
/// alone switches to each candidate, with common random numbers. Replication
/// r of seed s uses derive_seed(root_seed, "nash-N{N}-seed{s}-rep{r}").
/// Throws ConfigError for a candidate above the admissibility bound.
NashGapReport nash_gap_study(const ModelSpec& m, const MfgSolution& sol, const std::vector<Candidate>& candidates,
                             const NashOptions& options);

// Long-format CSV: N,seed,metric,value.
void write_csv(std::ostream& out, const ConvergenceReport& report);
void write_csv(std::ostream& out, const NashGapReport& report);

}  // namespace mfg
