#include <cmath>

#include <gtest/gtest.h>

#include "mfg/errors.hpp"
#include "mfg/forward.hpp"
#include "mfg/solver.hpp"

namespace mfg {
namespace {

ModelSpec congestion() {
  return builtin_model("congestion", {{"c", 1.0}, {"g_depth", 0.5}, {"g_center", 1.0}, {"p0_mean", -0.5}}, 1, 0.5);
}

TEST(SolveForward, ZeroFeedbackIsTheHeatFlow) {
  const auto problem = make_mfg_problem(builtin_model("free", {}, 1, 0.5), Grid(1, 8.0, 256), 20);
  const HeatOperator heat = make_heat_operator(problem);
  const LimitDensity ld = solve_forward(problem, heat, constant_feedback(problem, {0.0, 0.0}));
  ASSERT_TRUE(ld.converged);
  EXPECT_LE(ld.iterations, 2);
  for (int k = 0; k <= problem.steps; ++k) {
    EXPECT_LE(sup_distance(ld.p.frames[k], heat.apply(problem.time(k), problem.p0)), 1e-8);
  }
}

TEST(SolveForward, ConstantFeedbackShiftsTheHeatFlow) {
  const double c = 0.4;
  auto error = [&](int n, int M) {
    const auto problem = make_mfg_problem(builtin_model("free", {}, 1, 0.5), Grid(1, 8.0, n), M);
    const HeatOperator heat = make_heat_operator(problem);
    const LimitDensity ld = solve_forward(problem, heat, constant_feedback(problem, {c, 0.0}));
    const double T = problem.t1;
    const Field heat_T = heat.apply(T, problem.p0);
    // Characteristics: p(T, x) = (P_T p0)(x - cT), evaluated by interpolation.
    Field want(problem.grid);
    for (std::size_t i = 0; i < want.size(); ++i) want[i] = interpolate(heat_T, {problem.grid.point(i)[0] - c * T, 0.0});
    return sup_distance(ld.p.frames.back(), want);
  };
  const double e1 = error(256, 50), e2 = error(512, 100);
  EXPECT_LE(e1, 0.05);
  EXPECT_LT(e2, 0.6 * e1);  // O(dt + h^2)
}

TEST(SolveForward, AdmissibilityBoundIsEnforced) {
  const auto problem = make_mfg_problem(congestion(), Grid(1, 8.0, 128), 10);
  ForwardOptions opt;
  opt.alpha_bound = 0.3;
  EXPECT_THROW(solve_forward(problem, constant_feedback(problem, {0.5, 0.0}), opt), ConfigError);
}

class ForwardVsMfg : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    problem_ = new MfgProblem(make_mfg_problem(congestion(), Grid(1, 8.0, 256), 50));
    SolverOptions opt;
    opt.tol = 1e-10;
    solution_ = new MfgSolution(solve_mfg(*problem_, opt));
  }
  static void TearDownTestSuite() {
    delete solution_;
    delete problem_;
  }
  static MfgProblem* problem_;
  static MfgSolution* solution_;
};
MfgProblem* ForwardVsMfg::problem_ = nullptr;
MfgSolution* ForwardVsMfg::solution_ = nullptr;

TEST_F(ForwardVsMfg, AlphaStarReproducesTheMfgDensity) {
  const LimitDensity ld = solve_forward(*problem_, solution_->alpha_star);
  ASSERT_TRUE(ld.converged);
  double gap = 0.0;
  for (int k = 0; k <= problem_->steps; ++k) gap = std::max(gap, sup_distance(ld.p.frames[k], solution_->p.frames[k]));
  EXPECT_LE(gap, 2.0 * (ld.residual + solution_->residual_history.back()));
}

TEST_F(ForwardVsMfg, DistinctStartsAgree) {
  ForwardOptions a, b;
  a.tol = b.tol = 1e-10;
  b.start = ForwardStart::frozen_initial;
  const LimitDensity la = solve_forward(*problem_, solution_->alpha_star, a);
  const LimitDensity lb = solve_forward(*problem_, solution_->alpha_star, b);
  ASSERT_TRUE(la.converged && lb.converged);
  double gap = 0.0;
  for (int k = 0; k <= problem_->steps; ++k) gap = std::max(gap, sup_distance(la.p.frames[k], lb.p.frames[k]));
  EXPECT_LE(gap, 2.0 * a.tol);
}

TEST_F(ForwardVsMfg, FixedPointIsNonnegativeBeforeClipping) {
  // Early sweeps are linearisations of a shift and undershoot, so clipping
  // is active there; the map applied to the converged flow is not clipped.
  const HeatOperator heat = make_heat_operator(*problem_);
  for (double c : {0.2, 0.8}) {
    const VectorFlow alpha = constant_feedback(*problem_, {-c, 0.0});
    const LimitDensity ld = solve_forward(*problem_, heat, alpha);
    ASSERT_TRUE(ld.converged);
    VectorFlow theta = alpha;
    for (auto& f : theta.frames) f *= -1.0;
    const MfgIterate next = gamma_step(*problem_, heat, MfgIterate{ld.p, theta});
    for (const auto& f : next.p.frames) {
      for (double v : f.values()) ASSERT_GE(v, -1e-8);
      EXPECT_NEAR(integrate(f), 1.0, 1e-6);
    }
  }
}

TEST(FeedbackHelpers, ConstantFeedbackSupNorm) {
  const auto problem = make_mfg_problem(congestion(), Grid(1, 8.0, 64), 4);
  const VectorFlow a = constant_feedback(problem, {-0.7, 0.0});
  EXPECT_EQ(a.steps(), 4);
  EXPECT_EQ(sup_norm(a), 0.7);
}

}  // namespace
}  // namespace mfg
