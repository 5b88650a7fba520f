// Serial reference vs OpenMP kernels for bootstrap replicates and fit_all.
#include <benchmark/benchmark.h>

#include "misstab/bootstrap.hpp"
#include "misstab/datasets.hpp"
#include "misstab/fit.hpp"

using namespace misstab;

namespace {

const FitResult& m5_fit() {
  static const FitResult fit = [] {
    const auto t = builtin_dataset("bone-density");
    return fit_model(find_model(t.schema(), "M5"), t);
  }();
  return fit;
}

BootstrapOptions reps(std::int64_t n) {
  BootstrapOptions o;
  o.replicates = n;
  return o;
}

void BM_BootstrapSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_from_fit_serial(m5_fit(), reps(state.range(0))));
}

void BM_BootstrapParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_from_fit(m5_fit(), reps(state.range(0))));
}

void BM_FitAllSerial(benchmark::State& state) {
  const auto t = builtin_dataset("spo-y1y2");
  for (auto _ : state) benchmark::DoNotOptimize(fit_all_serial(t));
}

void BM_FitAllParallel(benchmark::State& state) {
  const auto t = builtin_dataset("spo-y1y2");
  for (auto _ : state) benchmark::DoNotOptimize(fit_all(t));
}

}  // namespace

BENCHMARK(BM_BootstrapSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BootstrapParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FitAllSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FitAllParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
