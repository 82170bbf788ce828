#include "balancelab/process.hpp"

#include <cmath>
#include <stdexcept>

namespace balancelab {

PairChoice sample_pair(Pcg32& rng, int n) {
  if (n < 2) throw std::invalid_argument("sample_pair: need at least two nodes");
  std::uint32_t u = rng.bounded(static_cast<std::uint32_t>(n));
  std::uint32_t w = rng.bounded(static_cast<std::uint32_t>(n - 1));
  std::uint32_t v = w < u ? w : w + 1;
  return PairChoice{static_cast<int>(u), static_cast<int>(v)};
}

Simulator::Simulator(LoadVector initial, Pcg32 pair_rng)
    : state_(std::move(initial)), rng_(pair_rng) {
  if (state_.n() < 2) throw std::invalid_argument("Simulator: need at least two nodes");
}

StepRecord Simulator::step() { return apply_pair(sample_pair(rng_, state_.n())); }

StepRecord Simulator::apply_pair(PairChoice pair) {
  if (pair.u == pair.v || pair.u < 0 || pair.v < 0 || pair.u >= state_.n() ||
      pair.v >= state_.n()) {
    throw std::invalid_argument("apply_pair: invalid node pair");
  }
  StepRecord rec;
  rec.pair = pair;
  rec.load_u_before = state_.loads[pair.u];
  rec.load_v_before = state_.loads[pair.v];
  auto [ceil_half, floor_half] = balance_pair(rec.load_u_before, rec.load_v_before);
  state_.loads[pair.u] = ceil_half;
  state_.loads[pair.v] = floor_half;
  rec.load_u_after = ceil_half;
  rec.load_v_after = floor_half;
  rec.t = ++t_;
  return rec;
}

long long default_step_cap(int n, long long initial_discrepancy) {
  double nn = static_cast<double>(n);
  double lg = std::log2(nn);
  double lgd = std::log2(static_cast<double>(initial_discrepancy) + 1.0);
  return static_cast<long long>(std::llround(64.0 * (nn * lg + nn * lgd))) + 64LL * n;
}

}  // namespace balancelab
