// Serial reference against the OpenMP kernels.
#include <benchmark/benchmark.h>

#include "synctrans/branch_tracker.hpp"
#include "synctrans/io.hpp"
#include "synctrans/phase_sweep.hpp"

namespace {

using namespace synctrans;

const auto kR = linspace(-0.3, 0.3, 41);
const auto kS = linspace(-0.3, 0.3, 41);

void BM_CritMapSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(criticality_map_reference(0.2, 0.5, kR, kS));
}
BENCHMARK(BM_CritMapSerial)->Unit(benchmark::kMillisecond);

void BM_CritMapParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(criticality_map(0.2, 0.5, kR, kS));
}
BENCHMARK(BM_CritMapParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

struct Setup {
  BrusselatorParams p;
  LimitCycle lc;
  EngineeredCoupling c;
  Setup() : lc(find_limit_cycle(p)) {
    const auto prc = compute_prc(lc, p);
    c = engineer_coupling(prc, lc, HmmTarget{});
  }
};

const Setup& setup() {
  static const Setup s;
  return s;
}

MapSettings short_runs() {
  MapSettings s;
  s.settle_periods = 20;
  s.tail_periods = 5;
  s.steps_per_period = 500;
  return s;
}

void BM_ParamMapSerial(benchmark::State& state) {
  const auto& s = setup();
  const auto K = linspace(0.02, 0.08, 4);
  const auto tau = linspace(0.0, 0.5 * s.lc.period, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(two_param_map_reference(s.p, s.lc, s.c, K, tau, {InitialCondition::in_phase()}, short_runs()));
}
BENCHMARK(BM_ParamMapSerial)->Unit(benchmark::kMillisecond);

void BM_ParamMapParallel(benchmark::State& state) {
  const auto& s = setup();
  const auto K = linspace(0.02, 0.08, 4);
  const auto tau = linspace(0.0, 0.5 * s.lc.period, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(two_param_map(s.p, s.lc, s.c, K, tau, {InitialCondition::in_phase()}, short_runs()));
}
BENCHMARK(BM_ParamMapParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
