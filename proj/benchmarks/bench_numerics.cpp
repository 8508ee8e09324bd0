#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "permchar/equidistribution.hpp"
#include "permchar/limit_theory.hpp"

using namespace permchar;

static void BM_StarDiscrepancy1D(benchmark::State& state) {
  const double phi[1] = {std::sqrt(2.0)};
  const auto seq = kronecker(phi, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(star_discrepancy_exact(seq));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StarDiscrepancy1D)->RangeMultiplier(10)->Range(100, 100000)->Complexity(benchmark::oNLogN);

static void BM_StarDiscrepancy2D(benchmark::State& state) {
  const double phis[2] = {std::sqrt(2.0), std::sqrt(3.0)};
  const auto seq = kronecker(phis, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(star_discrepancy_exact(seq));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StarDiscrepancy2D)->RangeMultiplier(2)->Range(250, 4000)->Complexity(benchmark::oNSquared)
    ->Unit(benchmark::kMillisecond);

static void BM_EtkBound2D(benchmark::State& state) {
  const double phis[2] = {std::sqrt(2.0), std::sqrt(3.0)};
  const auto H = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(etk_bound(phis, 1000, H));
  }
}
BENCHMARK(BM_EtkBound2D)->Arg(10)->Arg(50)->Arg(200);

static void BM_FiniteTypeEstimate(benchmark::State& state) {
  const double phis[2] = {std::sqrt(2.0), std::sqrt(3.0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(finite_type_estimate(phis, state.range(0)));
  }
}
BENCHMARK(BM_FiniteTypeEstimate)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_LimitConstants(benchmark::State& state) {
  const SpectralFunction fs[3] = {SpectralFunction::char_poly(), SpectralFunction::sym_part(),
                                  SpectralFunction::antisym_part()};
  const auto& f = fs[state.range(0)];
  for (auto _ : state) {
    benchmark::DoNotOptimize(limit_constants(f));
  }
  state.SetLabel(f.label());
}
BENCHMARK(BM_LimitConstants)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

static void BM_KhBound(benchmark::State& state) {
  const auto preset = finite_type_preset("sqrt2");
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto seq = kronecker(preset->phis, n);
  const double delta = shrink_delta(preset->certificate, n);
  const auto h = log_char_integrand();
  for (auto _ : state) {
    benchmark::DoNotOptimize(kh_error_bound(h, seq, delta));
  }
}
BENCHMARK(BM_KhBound)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
