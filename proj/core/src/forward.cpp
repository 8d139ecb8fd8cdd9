#include "mfg/forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfg/errors.hpp"
#include "mild.hpp"

namespace mfg {

double sup_norm(const VectorFlow& alpha) {
  double m = 0.0;
  for (const auto& f : alpha.frames) m = std::max(m, sup_norm(f));
  return m;
}

VectorFlow constant_feedback(const MfgProblem& problem, const Point& value) {
  VectorField frame(problem.grid);
  for (int a = 0; a < problem.grid.dim(); ++a) {
    for (auto& v : frame.component(a).values()) v = value[a];
  }
  return VectorFlow{problem.t0, problem.t1, std::vector<VectorField>(problem.steps + 1, frame)};
}

LimitDensity solve_forward(const MfgProblem& problem, const VectorFlow& alpha, const ForwardOptions& options) {
  return solve_forward(problem, make_heat_operator(problem), alpha, options);
}

LimitDensity solve_forward(const MfgProblem& pr, const HeatOperator& heat, const VectorFlow& alpha,
                           const ForwardOptions& opt) {
  if (alpha.steps() != pr.steps) throw ConfigError("feedback flow and problem have different time ladders");
  for (const auto& f : alpha.frames) require_same_grid(f.grid(), pr.grid, "solve_forward feedback");
  if (opt.alpha_bound) {
    const double s = sup_norm(alpha);
    if (s > *opt.alpha_bound) {
      std::ostringstream msg;
      msg << "feedback sup norm " << s << " exceeds the admissibility bound " << *opt.alpha_bound;
      throw ConfigError(msg.str());
    }
  }

  const int M = pr.steps;
  LimitDensity out;
  out.alpha_used = alpha;
  FieldFlow p{pr.t0, pr.t1, std::vector<Field>(M + 1, pr.p0)};
  if (opt.start == ForwardStart::heat_flow) {
    for (int k = 1; k <= M; ++k) p.frames[k] = heat.apply(pr.time(k) - pr.t0, pr.p0);
  }

  for (int it = 1; it <= opt.max_iter; ++it) {
    std::vector<VectorField> velocity;
    velocity.reserve(M + 1);
    for (int k = 0; k <= M; ++k) {
      VectorField v = alpha.frames[k];
      if (!pr.model.drift_is_zero) v += drift_field(pr.model, p.frames[k]);
      velocity.push_back(std::move(v));
    }
    FieldFlow next = detail::forward_mild_map(heat, pr.p0, pr.t0, pr.t1, p, velocity);
    for (int k = 0; k <= M; ++k) {
      for (double v : next.frames[k].values()) {
        if (!std::isfinite(v)) {
          std::ostringstream msg;
          msg << "solve_forward: non-finite density at iteration " << it << ", frame " << k;
          throw NumericalError(msg.str());
        }
      }
    }
    const auto clip = detail::clip_and_renormalize(next);
    out.max_clipped_mass = std::max(out.max_clipped_mass, clip.clipped_mass);
    if (clip.clipped_mass > opt.max_clipped_mass) {
      throw NumericalError("solve_forward: clipped negative density mass exceeds limit");
    }
    const double r = detail::flow_distance(next, p);
    out.residual_history.push_back(r);
    out.iterations = it;
    out.residual = r;
    p = std::move(next);
    if (r <= opt.tol) {
      out.converged = true;
      break;
    }
  }
  out.p = std::move(p);
  return out;
}

}  // namespace mfg
