#include <benchmark/benchmark.h>

#include <cstdint>

#include "permchar/class_functions.hpp"
#include "permchar/harness.hpp"
#include "permchar/multiplier.hpp"
#include "permchar/permutation.hpp"
#include "permchar/random.hpp"

using namespace permchar;

static void BM_FellerChainDense(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Stream s(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cycle_counts_from_chain(sample_feller_chain(n, EwensParameter(1.0), s)));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FellerChainDense)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

static void BM_FellerSparse(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Stream s(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_cycle_type(n, EwensParameter(1.0), s));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FellerSparse)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

static void BM_CrpPermutation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Stream s(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_permutation_crp(n, EwensParameter(1.0), s));
  }
}
BENCHMARK(BM_CrpPermutation)->RangeMultiplier(10)->Range(100, 100000);

static void BM_LogZUniform(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto model = MultiplierModel::uniform();
  const UnitAngle x(0.41421356237309515);
  Stream s(1);
  for (auto _ : state) {
    const auto ct = sample_cycle_type(n, EwensParameter(1.0), s);
    benchmark::DoNotOptimize(log_Z(ct, x, model, s));
  }
}
BENCHMARK(BM_LogZUniform)->Arg(1000)->Arg(10000);

static void BM_LogZFourier(benchmark::State& state) {
  const auto model = MultiplierModel::fourier({{0, 1.0}, {1, 0.3}, {2, Complex(0.1, 0.1)}});
  const UnitAngle x(0.41421356237309515);
  Stream s(1);
  for (auto _ : state) {
    const auto ct = sample_cycle_type(10000, EwensParameter(1.0), s);
    benchmark::DoNotOptimize(log_Z(ct, x, model, s));
  }
}
BENCHMARK(BM_LogZFourier);

static void BM_RunExperimentOnePoint(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.n = 10000;
  cfg.points = {UnitAngle(0.41421356237309515)};
  cfg.num_samples = 500;
  cfg.master_seed = 1;
  cfg.workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_experiment(cfg));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.num_samples));
}
BENCHMARK(BM_RunExperimentOnePoint)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
