#include <benchmark/benchmark.h>

#include "qmodular/maass.hpp"
#include "qmodular/special.hpp"
#include "qmodular/theta.hpp"

using namespace qmod;

namespace {

const Params P5(5, 2);

void BM_BetaIncHalf(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  double x = 0.0;
  for (auto _ : state) {
    x += 1e-3;
    if (x >= 1.0) x = 1e-3;
    benchmark::DoNotOptimize(beta_inc_half(x, n));
  }
}
BENCHMARK(BM_BetaIncHalf)->Arg(2)->Arg(4)->Arg(8);

void BM_Psi(benchmark::State& state) {
  TruncationPolicy pol;
  pol.bound_a = state.range(0);
  c_infinity(P5);  // memoised; keep it out of the timing
  for (auto _ : state) benchmark::DoNotOptimize(eval_Psi(P5, Point::upper(0.13, 1.4), pol));
}
BENCHMARK(BM_Psi)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Lambda(benchmark::State& state) {
  TruncationPolicy pol;
  pol.bound_a = state.range(0);
  const SeriesEngine e(P5, pol);
  for (auto _ : state) benchmark::DoNotOptimize(e.Lambda(Point::upper(0.13, 1.4)));
}
BENCHMARK(BM_Lambda)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_EichlerPair(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(eichler_integrals(P5, Point::upper(0.1, 0.7 + 0.5 * state.range(0))));
}
BENCHMARK(BM_EichlerPair)->Arg(0)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ThetaKernel(benchmark::State& state) {
  ThetaPolicy pol;
  pol.target_tol = state.range(0) == 0 ? 1e-8 : 1e-12;
  for (auto _ : state)
    benchmark::DoNotOptimize(eval_theta_kernel(2, Point::upper(0.2, 1.1), Point::upper(0.1, 0.3), pol));
}
BENCHMARK(BM_ThetaKernel)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
