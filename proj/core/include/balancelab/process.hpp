#pragma once

#include <utility>

#include "balancelab/load_vector.hpp"
#include "balancelab/rng.hpp"

namespace balancelab {

// Ordered pair of interacting nodes; u receives the ceiling share.
struct PairChoice {
  int u = 0;
  int v = 0;
};

// One balancing action: the first node ends with ceil((a+b)/2) tokens, the
// second with floor((a+b)/2). Works for signed loads.
constexpr std::pair<long long, long long> balance_pair(long long a, long long b) {
  long long sum = a + b;
  long long q = sum / 2;
  if (sum % 2 != 0 && sum < 0) q -= 1;  // floor for negative odd sums
  long long floor_half = q;
  long long ceil_half = floor_half + (sum % 2 != 0 ? 1 : 0);
  return {ceil_half, floor_half};
}

// Uniform draw over all n(n-1) ordered pairs.
PairChoice sample_pair(Pcg32& rng, int n);

struct StepRecord {
  long long t = 0;  // time index after the step was applied
  PairChoice pair;
  long long load_u_before = 0;
  long long load_v_before = 0;
  long long load_u_after = 0;
  long long load_v_after = 0;
};

// Sequentially executes balancing steps on a load vector. One instance per
// run; pure queries are const. Use apply_pair for externally chosen pairs
// (couplings, exhaustive enumerations), step() for the random process.
class Simulator {
 public:
  Simulator(LoadVector initial, Pcg32 pair_rng);

  StepRecord step();
  StepRecord apply_pair(PairChoice pair);

  const LoadVector& state() const { return state_; }
  long long time() const { return t_; }

 private:
  LoadVector state_;
  Pcg32 rng_;
  long long t_ = 0;
};

// Steps allowed before a run is declared capped. Far above the expected
// balancing time at every desk scale, so hitting it signals a defect rather
// than bad luck.
long long default_step_cap(int n, long long initial_discrepancy);

}  // namespace balancelab
