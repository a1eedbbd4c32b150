#include <benchmark/benchmark.h>

#include "covercmp/comparison.hpp"
#include "covercmp/oracle.hpp"

using namespace covercmp;

namespace {

void BM_Moments(benchmark::State& state) {
  const SeverityModel m = baseline_scenario().severity;
  double d = 0.0;
  for (auto _ : state) {
    d = d + 997.0 <= m.cap() ? d + 997.0 : 0.0;
    benchmark::DoNotOptimize(excess_mean(m, d));
    benchmark::DoNotOptimize(excess_second_moment(m, d));
    benchmark::DoNotOptimize(mixed_moment(m, d));
  }
}
BENCHMARK(BM_Moments);

void BM_MvIndemnity(benchmark::State& state) {
  const Scenario s = baseline_scenario();
  double d = 0.0;
  for (auto _ : state) {
    d = d + 997.0 <= s.severity.cap() ? d + 997.0 : 0.0;
    benchmark::DoNotOptimize(mv_indemnity(s, d));
  }
}
BENCHMARK(BM_MvIndemnity);

void BM_GeneralDeductibleOptimum(benchmark::State& state) {
  Scenario s = baseline_scenario();
  s.frequency = FrequencyModel::general(0.02, 0.04);
  for (auto _ : state) benchmark::DoNotOptimize(general_deductible_optimum(s));
}
BENCHMARK(BM_GeneralDeductibleOptimum);

void BM_IndifferenceGamma(benchmark::State& state) {
  const Scenario s = baseline_scenario();
  for (auto _ : state) {
    benchmark::DoNotOptimize(indifference_gamma_d(s, IndifferenceMode::PremiumMatched));
  }
}
BENCHMARK(BM_IndifferenceGamma);

void BM_Surface(benchmark::State& state) {
  const Scenario s = baseline_scenario();
  const auto kind = static_cast<SurfaceKind>(state.range(0));
  const GridSpec grid = default_grid(kind, s);
  for (auto _ : state) benchmark::DoNotOptimize(surface(s, grid, kind, 1));
  state.SetItemsProcessed(state.iterations() * grid.axis1.steps * grid.axis2.steps);
}
BENCHMARK(BM_Surface)
    ->Arg(static_cast<int>(SurfaceKind::PremiumMatchDGamma))
    ->Arg(static_cast<int>(SurfaceKind::PremiumMatchThetaGamma))
    ->Arg(static_cast<int>(SurfaceKind::BudgetPGamma))
    ->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const Scenario s = baseline_scenario();
  const auto years = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        oracle::simulate_wealth(s, oracle::Design::indemnity(22'500.0), {years, 42, false, 1}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(100'000)->Arg(2'000'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
