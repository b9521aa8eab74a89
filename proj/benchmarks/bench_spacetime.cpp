#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "mfgplan/continuity.hpp"
#include "mfgplan/spacetime_solver.hpp"

using namespace mfgplan;

namespace {

void BM_SpacetimeSolve1D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TorusGrid g = TorusGrid::make_1d(n, n, 1.0);
  SpacetimeSolver solver(g, TimeLayout::nodes, SpacetimeOperator::neumann_time_periodic_space);
  ScalarField rhs(g);
  for (int k = 0; k <= g.nt(); ++k) {
    for (int i = 0; i < n; ++i) rhs(k, g.cell_index(i)) = std::cos(2.0 * std::numbers::pi * g.x(i)) * (k - 0.5 * g.nt());
  }
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve_projected(rhs));
}
BENCHMARK(BM_SpacetimeSolve1D)->Arg(64)->Arg(256)->Arg(1024);

void BM_SpacetimeSolve2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TorusGrid g = TorusGrid::make_2d(n, n, n / 2, 1.0);
  SpacetimeSolver solver(g, TimeLayout::nodes, SpacetimeOperator::neumann_time_periodic_space);
  ScalarField rhs(g);
  for (int k = 0; k <= g.nt(); ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) rhs(k, g.cell_index(i, j)) = std::sin(2.0 * std::numbers::pi * (g.x(i) + g.y(j))) * k;
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve_projected(rhs));
}
BENCHMARK(BM_SpacetimeSolve2D)->Arg(32)->Arg(64);

void BM_ContinuityProject2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TorusGrid g = TorusGrid::make_2d(n, n, n / 2, 1.0);
  ContinuityProjector projector(g, std::vector<double>(g.cells(), 1.0), std::vector<double>(g.cells(), 1.0));
  for (auto _ : state) {
    state.PauseTiming();
    ScalarField m(g, TimeLayout::nodes, 1.0);
    VectorField w(g, TimeLayout::intervals, 0.25);
    m(1, 0) = 3.0;
    state.ResumeTiming();
    projector.project(m, w);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_ContinuityProject2D)->Arg(32)->Arg(64);

}  // namespace
