#pragma once

#include <cstdint>
#include <vector>

#include "balancelab/rational.hpp"

namespace balancelab {

// Integer load per node; the sole essential state of the balancing process.
// Loads are non-negative for the standard process; signed values are legal
// so the negated mirror process is expressible.
struct LoadVector {
  std::vector<long long> loads;

  int n() const { return static_cast<int>(loads.size()); }

  long long total() const {
    long long s = 0;
    for (long long v : loads) s += v;
    return s;
  }

  long long max_load() const;
  long long min_load() const;
  long long discrepancy() const { return max_load() - min_load(); }
};

// Quantities the analysis derives from a load vector: exact average m/n,
// its nearest-integer rounding, and the max-min discrepancy.
struct DerivedQuantities {
  Rational average;
  long long rounded_average = 0;
  long long discrepancy = 0;
};

DerivedQuantities derive(const LoadVector& lv,
                         RoundingRule rule = RoundingRule::kHalfAwayFromZero);

Rational average_load(const LoadVector& lv);
long long rounded_average(const LoadVector& lv,
                          RoundingRule rule = RoundingRule::kHalfAwayFromZero);

// FNV-1a over the load values; a compact fingerprint for summaries and
// reproducibility comparisons.
std::uint64_t fnv1a_digest(const LoadVector& lv);

}  // namespace balancelab
