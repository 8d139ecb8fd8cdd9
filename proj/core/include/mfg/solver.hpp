#pragma once

#include <vector>

#include "mfg/field.hpp"
#include "mfg/model.hpp"
#include "mfg/semigroup.hpp"

namespace mfg {

/// Data of one backward/forward solve on [t0, t1] with `steps` uniform steps.
struct MfgProblem {
  ModelSpec model;
  Grid grid;
  double t0 = 0.0;
  double t1 = 1.0;
  int steps = 1;
  Field p0;  // initial density, unit mass
  Field g;   // terminal cost

  double dt() const { return (t1 - t0) / steps; }
  double time(int k) const { return t0 + k * dt(); }
};

/// Problem on [0, T] with p0 renormalised on the grid and g sampled.
MfgProblem make_mfg_problem(const ModelSpec& model, const Grid& grid, int steps);

/// Same data restricted to [time(frame), t1], starting from the density
/// frame p.frames[frame].
MfgProblem restart_problem(const MfgProblem& problem, const FieldFlow& p, int frame);

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
  double damping = 1.0;
  double min_damping = 0.25;
  double max_clipped_mass = 1e-2;
};

/// Iterate of the contraction map: density flow and theta = grad u flow.
struct MfgIterate {
  FieldFlow p;
  VectorFlow theta;
};

struct MfgSolution {
  FieldFlow u;
  FieldFlow p;
  VectorFlow theta;
  VectorFlow alpha_star;  // = -theta, frame by frame
  double k_bound = 0.0;   // sup over frames and nodes of |grad u|
  std::vector<double> residual_history;
  bool converged = false;
  int iterations = 0;
  double max_clipped_mass = 0.0;
  double mass_drift = 0.0;  // largest |mass - 1| before renormalisation
  double final_damping = 1.0;

  /// Largest ratio r_{k+1}/r_k over the history after the first iteration.
  double contraction_ratio() const;
};

struct HopfColeSolution {
  FieldFlow w;
  FieldFlow u_from_w;
  FieldFlow p;
  VectorFlow grad_w;
  std::vector<double> residual_history;
  bool converged = false;
  int iterations = 0;
  double min_w = 0.0;
};

struct MildResidual {
  double r_u = 0.0;
  double r_p = 0.0;
};

/// Heat operator with the problem's lag ladder {dt, ..., steps*dt}.
HeatOperator make_heat_operator(const MfgProblem& problem);

/// Initial iterate: p(t) = P_t p0, theta(t) = grad P_{T-t} g.
MfgIterate initial_iterate(const MfgProblem& problem, const HeatOperator& heat);

/// One application of the contraction map Gamma = (Gamma_1, Gamma_2), with
/// left-endpoint quadrature in the direction of integration (the last
/// subinterval uses the exact operator at lag dt). No clipping.
MfgIterate gamma_step(const MfgProblem& problem, const HeatOperator& heat, const MfgIterate& current);

/// Damped Picard iteration on Gamma, followed by reconstruction of u from
/// the backward mild equation.
MfgSolution solve_mfg(const MfgProblem& problem, const SolverOptions& options = {});
MfgSolution solve_mfg(const MfgProblem& problem, const HeatOperator& heat,
                      const SolverOptions& options = {});
MfgSolution solve_mfg(const ModelSpec& model, const Grid& grid, int steps,
                      const SolverOptions& options = {});

/// Picard iteration on the Hopf-Cole pair (w, p) with w = exp(-u).
HopfColeSolution solve_hopf_cole(const MfgProblem& problem, const SolverOptions& options = {});

/// Sup-norm defects of (u, p) in the mild equations, evaluated with an
/// independent midpoint quadrature (kernels at half-integer lags).
MildResidual verify_mild_residual(const MfgProblem& problem, const MfgSolution& solution);

// Pointwise coefficient fields at a density frame.
VectorField drift_field(const ModelSpec& m, const Field& density);
Field running_cost_field(const ModelSpec& m, const Field& density);

}  // namespace mfg
