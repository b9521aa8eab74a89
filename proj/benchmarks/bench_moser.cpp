#include <benchmark/benchmark.h>

#include "mfgplan/moser.hpp"

using namespace mfgplan;

namespace {

void BM_QPochhammer(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(q_pochhammer(-1.0, 0.5));
}
BENCHMARK(BM_QPochhammer);

void BM_MoserCertificate(benchmark::State& state) {
  MoserParams params;
  params.alpha = 1.0;
  params.r = 2.0;
  const int horizon = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(moser_certificate(params, horizon));
}
BENCHMARK(BM_MoserCertificate)->Arg(60)->Arg(200);

}  // namespace
