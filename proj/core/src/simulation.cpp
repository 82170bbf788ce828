#include "balancelab/simulation.hpp"

#include <stdexcept>

namespace balancelab {

RunResult run(const RunConfig& config, const StepObserver& observer) {
  if (config.initial.n() < 2) throw std::invalid_argument("run: need at least two nodes");
  if (config.stop == StopRule::kFixedSteps && config.fixed_steps < 0) {
    throw std::invalid_argument("run: negative step budget");
  }
  if (config.granularity == TraceGranularity::kEveryK && config.every_k < 1) {
    throw std::invalid_argument("run: every_k must be positive");
  }

  RunResult result;
  result.initial_delta = config.initial.discrepancy();

  long long limit = config.stop == StopRule::kFixedSteps
                        ? config.fixed_steps
                        : config.step_cap.value_or(default_step_cap(
                              config.initial.n(), result.initial_delta));

  PhaseDetector detector(config.initial, config.c, config.rounding);
  long long rounded_avg = rounded_average(config.initial, config.rounding);

  std::optional<TokenLayout> layout;
  std::optional<Pcg32> shuffle_rng;
  if (config.instrument_tokens) {
    layout = TokenLayout::from_loads(config.initial);
    shuffle_rng = Pcg32(config.seed, stream_for(config.replication, kShuffleChannel));
  }

  Simulator sim(config.initial,
                Pcg32(config.seed, stream_for(config.replication, kPairChannel)));

  auto keep_row = [&](const StepRecord& rec, const PhaseTimes& before,
                      const PhaseTimes& after) {
    switch (config.granularity) {
      case TraceGranularity::kNone:
        return false;
      case TraceGranularity::kFull:
        return true;
      case TraceGranularity::kEveryK:
        return rec.t % config.every_k == 0;
      case TraceGranularity::kPhaseBoundaries:
        return before.t1 != after.t1 || before.t2 != after.t2 || before.t3 != after.t3;
    }
    return false;
  };

  while (true) {
    if (config.stop == StopRule::kAlmostBalanced && detector.almost_balanced()) break;
    if (sim.time() >= limit) {
      result.capped = config.stop == StopRule::kAlmostBalanced;
      break;
    }
    PhaseTimes before = detector.times();
    StepRecord rec = sim.step();
    if (layout) {
      layout->apply_balanced_transfer(rec.pair, config.mode, rounded_avg,
                                      shuffle_rng ? &*shuffle_rng : nullptr);
    }
    detector.on_step(rec);
    if (keep_row(rec, before, detector.times())) {
      result.trace.push_back(TraceRow{rec, detector.phi_scaled(), detector.current_max(),
                                      detector.current_min()});
    }
    if (observer) observer(rec, detector, layout ? &*layout : nullptr);
  }

  result.phases = detector.times();
  result.steps = sim.time();
  result.final_state = sim.state();
  result.final_layout = std::move(layout);
  return result;
}

}  // namespace balancelab
