#pragma once

#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "balancelab/load_vector.hpp"
#include "balancelab/process.hpp"
#include "balancelab/rational.hpp"

namespace balancelab {

// Phi = sum_i (l_i - m/n)^2, as an exact rational with denominator n^2.
Rational potential(const LoadVector& lv);

// n^2 * Phi = sum_i (n*l_i - m)^2, a plain integer. This is the exact form
// traces carry and the incremental detector updates.
Int128 potential_scaled(const LoadVector& lv);

// Potential drop of balancing nodes i and j, plus the parity term: delta =
// ((l_i - l_j)^2 - r^2) / 2 with r = 1 iff l_i + l_j is odd. Equals
// Phi(before) - Phi(after) exactly.
struct DropValue {
  Rational delta;
  int parity = 0;
};

DropValue potential_drop(const LoadVector& lv, int i, int j);

// Checks sum_{i<j} (l_i - l_j)^2 == n * Phi exactly. Test oracle, not a
// hot-path routine.
bool pairwise_square_sum_identity(const LoadVector& lv);

// Exact expectation of Phi after one random step: enumerates all n(n-1)
// ordered pairs, applies the balancing update to a copy, and averages the
// fresh potentials. Guarded to n <= 64.
Rational expected_potential_after_step(const LoadVector& lv);
inline constexpr int kExpectationEnumerationLimit = 64;

// Fraction of nodes with load at most the rounded average.
Rational gamma_fraction(const LoadVector& lv,
                        RoundingRule rule = RoundingRule::kHalfAwayFromZero);

// Nodes with load >= m/n + c (exact comparison: n*l_i >= m + c*n).
std::vector<int> overloaded_set(const LoadVector& lv, long long c);

// First-hit times of the three analysis predicates:
//   t1: Phi < n
//   t2: first step >= t1 with max <= avg + 2c and min >= avg - 2c
//   t3: all loads in {round(avg)-1, round(avg), round(avg)+1}
// t1 and t3 are independent first hits; t2 arms once t1 has fired. Absent
// fields mean the run ended (or was capped) before the predicate held.
struct PhaseTimes {
  std::optional<long long> t1;
  std::optional<long long> t2;
  std::optional<long long> t3;
};

// Incremental phase detection over one run's step feed. O(1) amortized per
// step: Phi is updated through the drop identity and max/min through load
// counts (max never increases and min never decreases under balancing, so
// the bucket scans amortize out).
class PhaseDetector {
 public:
  PhaseDetector(const LoadVector& initial, long long c,
                RoundingRule rule = RoundingRule::kHalfAwayFromZero);

  void on_step(const StepRecord& rec);

  const PhaseTimes& times() const { return times_; }
  bool almost_balanced() const { return times_.t3.has_value(); }

  Int128 phi_scaled() const { return phi_scaled_; }
  long long current_max() const { return max_; }
  long long current_min() const { return min_; }

 private:
  void check(long long t);

  long long n_ = 0;
  long long m_ = 0;
  long long c_ = 0;
  long long round_avg_ = 0;
  Int128 phi_scaled_ = 0;
  Int128 phi_threshold_ = 0;  // n^3, against n^2 * Phi
  long long max_ = 0;
  long long min_ = 0;
  std::unordered_map<long long, long long> counts_;
  PhaseTimes times_;
};

// Replays a recorded step sequence through a fresh detector.
PhaseTimes detect_phases(const LoadVector& initial, std::span<const StepRecord> steps,
                         long long c, RoundingRule rule = RoundingRule::kHalfAwayFromZero);

}  // namespace balancelab
