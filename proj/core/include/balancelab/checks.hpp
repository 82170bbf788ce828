#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "balancelab/load_vector.hpp"

namespace balancelab {

// One self-contained consistency check: `instances` cases examined,
// `violations` of them failed, `detail` describes the first failure.
struct CheckResult {
  std::string name;
  bool pass = false;
  long long instances = 0;
  long long violations = 0;
  std::string detail;
};

// A candidate pairwise update (receiver share, giver share) for a pair of
// loads. Used to probe the consistency checks with deliberately broken
// updates; an empty function means the canonical ceiling/floor split.
using PairUpdate = std::function<std::pair<long long, long long>(long long, long long)>;

// Conservation + ceiling/floor split + exact potential-drop bookkeeping of a
// pairwise update, on random vectors and random pairs.
CheckResult check_split_update(int trials, std::uint64_t seed, const PairUpdate& update = {});

// Sum over unordered pairs of squared load differences equals n times the
// potential, on random vectors.
CheckResult check_pairwise_identity(int trials, std::uint64_t seed);

// Exhaustive one-step expectation of the potential: matches the mean of the
// per-pair drops and respects the (1 - 1/n) * phi + 1/2 bound, exactly.
CheckResult check_expected_drop(int trials, std::uint64_t seed);

// Overloaded-node selection against an independent rational-arithmetic
// oracle, plus pinned instances.
CheckResult check_overload_selection(int trials, std::uint64_t seed);

// Identical load trajectories and phase times across the three token modes
// for a shared seed, with per-step layout/load agreement.
CheckResult check_mode_equivalence(int trials, int n, long long m, long long steps,
                                   std::uint64_t seed);

// Under the skip rule no token's height ever increases.
CheckResult check_skip_height_monotone(int trials, int n, long long m, long long steps,
                                       std::uint64_t seed);

// For tall-stack configurations (top token far above the rounded average,
// fewer than half the nodes overloaded) the one-step probability, over all
// ordered pair choices under the skip rule, that the top token's normalized
// height falls to at most 17/20 of its value is at least 1/n. Verified by
// exhaustive enumeration with exact arithmetic.
CheckResult check_reduction_event_mass(int configs, std::uint64_t seed);

// Negated initial vector driven with order-swapped pairs stays an exact
// mirror of the original trajectory.
CheckResult check_negation_coupling(int trials, long long steps, std::uint64_t seed);

// Full runs on small random instances terminate uncapped in a state that
// independently re-verifies the stopping band and conserves total load.
CheckResult check_termination_band(int trials, std::uint64_t seed);

// The default suite (modest trial counts), optionally filtered by name.
// Unknown names in the filter throw std::invalid_argument.
std::vector<CheckResult> run_checks(const std::vector<std::string>& filter, std::uint64_t seed);

// Names accepted by run_checks, in execution order.
std::vector<std::string> check_names();

}  // namespace balancelab
