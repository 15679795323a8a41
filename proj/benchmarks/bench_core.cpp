#include <consortium/equilibria.hpp>
#include <consortium/objectives.hpp>
#include <consortium/optimizer.hpp>
#include <consortium/pareto.hpp>
#include <consortium/sim.hpp>

#include <benchmark/benchmark.h>

using namespace consortium;

namespace {

const Model model;

void BM_PsiAlphaInv(benchmark::State& state) {
  double d = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(psi_alpha_inv(model, 0.5, d));
    d = d < 0.8 ? d + 1e-4 : 0.1;
  }
}
BENCHMARK(BM_PsiAlphaInv);

void BM_PsiAlpha(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(psi_alpha(model, 0.5, 1.0));
}
BENCHMARK(BM_PsiAlpha);

void BM_Classify(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(classify(model, Control{0.5, 0.5, 1.0}));
}
BENCHMARK(BM_Classify);

void BM_MaximizePOut(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(maximize_p_out(model, 1.0));
}
BENCHMARK(BM_MaximizePOut)->Unit(benchmark::kMillisecond);

void BM_GridOracle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(grid_oracle(model, Objective::productivity(), 1.0, n));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_GridOracle)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SweepFront(benchmark::State& state) {
  const auto thetas = uniform_thetas(101);
  for (auto _ : state) benchmark::DoNotOptimize(sweep_front(model, 1.0, thetas));
}
BENCHMARK(BM_SweepFront)->Unit(benchmark::kMillisecond);

void BM_Integrate(benchmark::State& state) {
  const Control u{0.5, 0.5, 1.0};
  const State x0{0.5, 0.2, 0.3, 4.0, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(integrate(model, x0, u, 100.0));
}
BENCHMARK(BM_Integrate)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
