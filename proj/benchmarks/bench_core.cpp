#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "mfg/field.hpp"
#include "mfg/grid.hpp"
#include "mfg/model.hpp"
#include "mfg/particles.hpp"
#include "mfg/rng.hpp"
#include "mfg/semigroup.hpp"
#include "mfg/solver.hpp"

namespace {

using namespace mfg;

ModelSpec congestion(int dim = 1) {
  return builtin_model("congestion", {{"c", 1.0}, {"g_depth", 0.5}, {"g_center", 1.0}, {"p0_mean", -0.5}}, dim, 0.5);
}

void BM_HeatApply(benchmark::State& state) {
  const Grid g(1, 8.0, static_cast<int>(state.range(0)));
  const HeatOperator heat(g);
  const Field f = field_from_function(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  heat.apply(0.1, f);  // warm the kernel cache
  for (auto _ : state) benchmark::DoNotOptimize(heat.apply(0.1, f));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HeatApply)->RangeMultiplier(2)->Range(128, 2048)->Complexity(benchmark::oNLogN);

void BM_HeatApply2D(benchmark::State& state) {
  const Grid g(2, 6.0, static_cast<int>(state.range(0)));
  const HeatOperator heat(g);
  const Field f = field_from_function(g, [](const Point& x) { return std::exp(-x[0] * x[0] - x[1] * x[1]); });
  heat.apply(0.1, f);
  for (auto _ : state) benchmark::DoNotOptimize(heat.apply(0.1, f));
}
BENCHMARK(BM_HeatApply2D)->Arg(32)->Arg(64);

void BM_GammaStep(benchmark::State& state) {
  const MfgProblem pr = make_mfg_problem(congestion(), Grid(1, 8.0, static_cast<int>(state.range(0))),
                                         static_cast<int>(state.range(1)));
  const HeatOperator heat = make_heat_operator(pr);
  MfgIterate it = initial_iterate(pr, heat);
  it = gamma_step(pr, heat, it);
  for (auto _ : state) benchmark::DoNotOptimize(gamma_step(pr, heat, it));
}
BENCHMARK(BM_GammaStep)->Args({256, 25})->Args({256, 50})->Unit(benchmark::kMillisecond);

void BM_SimulateStep(benchmark::State& state) {
  const ModelSpec m = congestion();
  const Grid g(1, 8.0, 256);
  SimConfig cfg;
  cfg.particles = state.range(0);
  cfg.steps = 10;
  cfg.seed = 11;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(m, g, cfg, Profile{}));
  state.SetItemsProcessed(state.iterations() * cfg.steps * cfg.particles);
}
BENCHMARK(BM_SimulateStep)->Arg(100)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

std::vector<Point> scatter(std::int64_t n, int dim) {
  Philox4x32 rng(derive_seed(3, "bench"));
  std::vector<Point> x(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto w = rng({static_cast<std::uint32_t>(i), 0, 0, 0});
    x[i] = {4.0 * uniform_open(w[0], w[1]) - 2.0, dim == 2 ? 4.0 * uniform_open(w[2], w[3]) - 2.0 : 0.0};
  }
  return x;
}

void BM_InteractionDirect(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(1));
  const auto x = scatter(state.range(0), dim);
  const Mollifier mol = mollifier_for(congestion(dim), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(interaction_direct(mol, x, dim));
}
BENCHMARK(BM_InteractionDirect)->Args({400, 1})->Args({1600, 1})->Args({1600, 2});

void BM_InteractionCellList(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(1));
  const auto x = scatter(state.range(0), dim);
  const Mollifier mol = mollifier_for(congestion(dim), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(interaction_cell_list(mol, x, dim));
}
BENCHMARK(BM_InteractionCellList)->Args({400, 1})->Args({1600, 1})->Args({1600, 2});

}  // namespace
BENCHMARK_MAIN();
