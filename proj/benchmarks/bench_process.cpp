#include <benchmark/benchmark.h>

#include "balancelab/harness.hpp"
#include "balancelab/metrics.hpp"
#include "balancelab/process.hpp"
#include "balancelab/simulation.hpp"

using namespace balancelab;

namespace {

LoadVector uniform_vector(int n, long long m) {
  Pcg32 rng(1, stream_for(0, kGenerateChannel));
  return generate_initial(DistributionSpec::uniform_random(n, m), rng);
}

void BM_SimulatorStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Simulator sim(uniform_vector(n, 16LL * n), Pcg32(7, stream_for(0, kPairChannel)));
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SimulatorStep)->Arg(16)->Arg(256)->Arg(4096);

void BM_StepWithPhaseDetector(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LoadVector initial = uniform_vector(n, 16LL * n);
  Simulator sim(initial, Pcg32(7, stream_for(0, kPairChannel)));
  PhaseDetector detector(initial, 10);
  for (auto _ : state) detector.on_step(sim.step());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepWithPhaseDetector)->Arg(16)->Arg(256)->Arg(4096);

void BM_PotentialScaled(benchmark::State& state) {
  const LoadVector lv = uniform_vector(static_cast<int>(state.range(0)), 16 * state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(potential_scaled(lv));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PotentialScaled)->Arg(16)->Arg(256)->Arg(4096);

// Full fixed-length runs with token instrumentation, one per mode.
void run_with_tokens(benchmark::State& state, BalanceMode mode) {
  constexpr long long kSteps = 2000;
  Pcg32 gen(1, stream_for(0, kGenerateChannel));
  RunConfig rc;
  rc.initial = generate_initial(DistributionSpec::point_mass(64, 4096), gen);
  rc.mode = mode;
  rc.seed = 7;
  rc.stop = StopRule::kFixedSteps;
  rc.fixed_steps = kSteps;
  rc.granularity = TraceGranularity::kNone;
  rc.instrument_tokens = true;
  for (auto _ : state) {
    const RunResult rr = run(rc);
    benchmark::DoNotOptimize(rr.steps);
  }
  state.SetItemsProcessed(state.iterations() * kSteps);
}

void BM_RunStackTokens(benchmark::State& state) { run_with_tokens(state, BalanceMode::stack()); }
void BM_RunSkipTokens(benchmark::State& state) { run_with_tokens(state, BalanceMode::skip()); }
void BM_RunShuffleTokens(benchmark::State& state) {
  run_with_tokens(state, BalanceMode::shuffle_stack(10));
}
BENCHMARK(BM_RunStackTokens)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunSkipTokens)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunShuffleTokens)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
