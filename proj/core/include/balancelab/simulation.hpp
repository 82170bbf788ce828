#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "balancelab/metrics.hpp"
#include "balancelab/process.hpp"
#include "balancelab/token_layout.hpp"

namespace balancelab {

enum class StopRule {
  kAlmostBalanced,  // stop once every load is within 1 of the rounded average
  kFixedSteps,      // run exactly fixed_steps steps
};

enum class TraceGranularity {
  kNone,
  kFull,
  kEveryK,
  kPhaseBoundaries,
};

// One persisted trace entry: the step plus the metrics after it.
struct TraceRow {
  StepRecord rec;
  Int128 phi_scaled = 0;
  long long max = 0;
  long long min = 0;
};

struct RunConfig {
  LoadVector initial;
  BalanceMode mode = BalanceMode::stack();
  long long c = 10;
  std::uint64_t seed = 1;
  std::uint64_t replication = 0;  // selects the stream block, see rng.hpp
  std::optional<long long> step_cap;
  StopRule stop = StopRule::kAlmostBalanced;
  long long fixed_steps = 0;
  TraceGranularity granularity = TraceGranularity::kFull;
  long long every_k = 1;
  RoundingRule rounding = RoundingRule::kHalfAwayFromZero;
  bool instrument_tokens = false;
};

struct RunResult {
  PhaseTimes phases;
  bool capped = false;
  long long steps = 0;
  LoadVector final_state;
  long long initial_delta = 0;
  std::vector<TraceRow> trace;
  std::optional<TokenLayout> final_layout;  // present when tokens were instrumented
};

// Called after every executed step; layout is non-null only when token
// instrumentation is on.
using StepObserver =
    std::function<void(const StepRecord&, const PhaseDetector&, const TokenLayout*)>;

// Executes one seeded run until the stopping rule fires or the step cap is
// reached. A cap hit is reported in the result, not thrown.
RunResult run(const RunConfig& config, const StepObserver& observer = {});

}  // namespace balancelab
