#include <benchmark/benchmark.h>

#include <random>

#include "mfgplan/operators.hpp"

using namespace mfgplan;

namespace {

ScalarField random_field(const TorusGrid& g) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g);
  for (double& v : f.values()) v = u(rng);
  return f;
}

void BM_Gradient2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TorusGrid g = TorusGrid::make_2d(n, n, 8, 1.0);
  const ScalarField f = random_field(g);
  for (auto _ : state) benchmark::DoNotOptimize(gradient(f));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.values().size()));
}
BENCHMARK(BM_Gradient2D)->Arg(64)->Arg(128)->Arg(256);

void BM_Laplacian2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TorusGrid g = TorusGrid::make_2d(n, n, 8, 1.0);
  const ScalarField f = random_field(g);
  for (auto _ : state) benchmark::DoNotOptimize(laplacian(f));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.values().size()));
}
BENCHMARK(BM_Laplacian2D)->Arg(64)->Arg(128)->Arg(256);

void BM_GradientNormSq1D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TorusGrid g = TorusGrid::make_1d(n, n, 1.0);
  const ScalarField f = random_field(g);
  for (auto _ : state) benchmark::DoNotOptimize(gradient_norm_sq(f));
}
BENCHMARK(BM_GradientNormSq1D)->Arg(256)->Arg(1024);

}  // namespace
