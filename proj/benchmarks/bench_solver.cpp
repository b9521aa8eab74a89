#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "mfgplan/planning_solver.hpp"

using namespace mfgplan;

namespace {

std::vector<double> bump(const TorusGrid& g, double shift) {
  std::vector<double> out(g.cells());
  for (int i = 0; i < g.nx(); ++i) out[g.cell_index(i)] = 1.0 + 0.9 * std::cos(2.0 * std::numbers::pi * (g.x(i) - shift));
  return out;
}

// Fixed iteration budget, so the timing is per Douglas-Rachford sweep.
void BM_PlanningIterations(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TorusGrid g = TorusGrid::make_1d(n, n / 2, 1.0);
  const PlanningProblem p(g, bump(g, 0.0), bump(g, 0.5), Coupling::power(1.0), ZeroPotential{});
  SolverConfig config;
  config.max_iters = 50;
  config.tolerance = 1e-300;
  for (auto _ : state) benchmark::DoNotOptimize(solve_planning(p, config));
  state.SetItemsProcessed(state.iterations() * config.max_iters);
}
BENCHMARK(BM_PlanningIterations)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_PlanningToTolerance(benchmark::State& state) {
  const TorusGrid g = TorusGrid::make_1d(64, 32, 1.0);
  const PlanningProblem p(g, bump(g, 0.0), bump(g, 0.5), Coupling::power(1.0), ZeroPotential{});
  SolverConfig config;
  config.max_iters = 5000;
  for (auto _ : state) benchmark::DoNotOptimize(solve_planning(p, config));
}
BENCHMARK(BM_PlanningToTolerance)->Unit(benchmark::kMillisecond);

}  // namespace
