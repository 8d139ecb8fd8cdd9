#pragma once

#include <optional>
#include <vector>

#include "mfg/field.hpp"
#include "mfg/solver.hpp"

namespace mfg {

/// Density of the limit (mean field) dynamics under a fixed feedback.
struct LimitDensity {
  FieldFlow p;
  VectorFlow alpha_used;
  double residual = 0.0;  // last Picard increment, sup over frames
  std::vector<double> residual_history;
  bool converged = false;
  int iterations = 0;
  double max_clipped_mass = 0.0;
};

enum class ForwardStart {
  heat_flow,       // p(t) = P_t p0
  frozen_initial,  // p(t) = p0 for all t
};

struct ForwardOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double max_clipped_mass = 1e-2;
  ForwardStart start = ForwardStart::heat_flow;
  /// Admissibility bound on sup |alpha|; unset means unchecked.
  std::optional<double> alpha_bound;
};

/// Picard iteration on p = P_t p0 - int gradP_{t-s} . (p(s)(alpha(s) + b(., p(s)))) ds
/// with the discretisation and clipping policy of the MFG solver. alpha must
/// live on the problem's grid and time ladder.
LimitDensity solve_forward(const MfgProblem& problem, const HeatOperator& heat, const VectorFlow& alpha,
                           const ForwardOptions& options = {});
LimitDensity solve_forward(const MfgProblem& problem, const VectorFlow& alpha,
                           const ForwardOptions& options = {});

/// Feedback flow constant in space and time.
VectorFlow constant_feedback(const MfgProblem& problem, const Point& value);

/// Largest |alpha| over frames and nodes.
double sup_norm(const VectorFlow& alpha);

}  // namespace mfg
