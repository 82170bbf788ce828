#include "balancelab/metrics.hpp"

#include <stdexcept>

namespace balancelab {

Rational potential(const LoadVector& lv) {
  long long n = lv.n();
  if (n < 1) throw std::invalid_argument("potential: empty load vector");
  return Rational(potential_scaled(lv), static_cast<Int128>(n) * n);
}

Int128 potential_scaled(const LoadVector& lv) {
  long long n = lv.n();
  if (n < 1) throw std::invalid_argument("potential_scaled: empty load vector");
  long long m = lv.total();
  Int128 acc = 0;
  for (long long l : lv.loads) {
    Int128 d = static_cast<Int128>(n) * l - m;
    acc += d * d;
  }
  return acc;
}

DropValue potential_drop(const LoadVector& lv, int i, int j) {
  if (i == j) throw std::invalid_argument("potential_drop: i == j");
  if (i < 0 || j < 0 || i >= lv.n() || j >= lv.n()) {
    throw std::out_of_range("potential_drop: node out of range");
  }
  long long li = lv.loads[i];
  long long lj = lv.loads[j];
  int r = ((li + lj) % 2 != 0) ? 1 : 0;
  Int128 d = static_cast<Int128>(li) - lj;
  DropValue out;
  out.parity = r;
  out.delta = Rational(d * d - r, 2);
  return out;
}

bool pairwise_square_sum_identity(const LoadVector& lv) {
  long long n = lv.n();
  Int128 lhs = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Int128 d = static_cast<Int128>(lv.loads[i]) - lv.loads[j];
      lhs += d * d;
    }
  }
  return Rational(lhs, 1) == Rational(n) * potential(lv);
}

Rational expected_potential_after_step(const LoadVector& lv) {
  int n = lv.n();
  if (n < 2) throw std::invalid_argument("expected_potential_after_step: need n >= 2");
  if (n > kExpectationEnumerationLimit) {
    throw std::invalid_argument("expected_potential_after_step: n exceeds enumeration guard");
  }
  Int128 scaled_sum = 0;  // sum over ordered pairs of n^2 * Phi(after)
  LoadVector work = lv;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      auto [ceil_half, floor_half] = balance_pair(lv.loads[u], lv.loads[v]);
      work.loads = lv.loads;
      work.loads[u] = ceil_half;
      work.loads[v] = floor_half;
      scaled_sum += potential_scaled(work);
    }
  }
  Int128 pairs = static_cast<Int128>(n) * (n - 1);
  return Rational(scaled_sum, pairs * n * n);
}

Rational gamma_fraction(const LoadVector& lv, RoundingRule rule) {
  long long target = rounded_average(lv, rule);
  long long count = 0;
  for (long long l : lv.loads) {
    if (l <= target) ++count;
  }
  return Rational(count, lv.n());
}

std::vector<int> overloaded_set(const LoadVector& lv, long long c) {
  long long n = lv.n();
  long long m = lv.total();
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    // l_i >= m/n + c, kept exact.
    if (static_cast<Int128>(n) * lv.loads[i] >= static_cast<Int128>(m) + static_cast<Int128>(c) * n) {
      out.push_back(i);
    }
  }
  return out;
}

PhaseDetector::PhaseDetector(const LoadVector& initial, long long c, RoundingRule rule)
    : n_(initial.n()), m_(initial.total()), c_(c) {
  if (n_ < 1) throw std::invalid_argument("PhaseDetector: empty load vector");
  round_avg_ = rounded_average(initial, rule);
  phi_scaled_ = potential_scaled(initial);
  phi_threshold_ = static_cast<Int128>(n_) * n_ * n_;
  max_ = initial.max_load();
  min_ = initial.min_load();
  counts_.reserve(initial.loads.size() * 2);
  for (long long l : initial.loads) ++counts_[l];
  check(0);
}

void PhaseDetector::on_step(const StepRecord& rec) {
  // Drop identity keeps Phi exact: n^2 * delta = n^2 ((du)^2 - r) / 2.
  long long du = rec.load_u_before - rec.load_v_before;
  Int128 r = ((rec.load_u_before + rec.load_v_before) % 2 != 0) ? 1 : 0;
  Int128 d2 = static_cast<Int128>(du) * du - r;
  phi_scaled_ -= static_cast<Int128>(n_) * n_ * d2 / 2;

  auto move_load = [&](long long from, long long to) {
    if (from == to) return;
    auto it = counts_.find(from);
    if (--(it->second) == 0) counts_.erase(it);
    ++counts_[to];
  };
  move_load(rec.load_u_before, rec.load_u_after);
  move_load(rec.load_v_before, rec.load_v_after);
  while (counts_.find(max_) == counts_.end()) --max_;
  while (counts_.find(min_) == counts_.end()) ++min_;

  check(rec.t);
}

void PhaseDetector::check(long long t) {
  if (!times_.t1 && phi_scaled_ < phi_threshold_) times_.t1 = t;
  if (times_.t1 && !times_.t2) {
    bool hi = static_cast<Int128>(n_) * max_ <= static_cast<Int128>(m_) + 2 * c_ * n_;
    bool lo = static_cast<Int128>(n_) * min_ >= static_cast<Int128>(m_) - 2 * c_ * n_;
    if (hi && lo) times_.t2 = t;
  }
  if (!times_.t3 && max_ <= round_avg_ + 1 && min_ >= round_avg_ - 1) times_.t3 = t;
}

PhaseTimes detect_phases(const LoadVector& initial, std::span<const StepRecord> steps,
                         long long c, RoundingRule rule) {
  PhaseDetector det(initial, c, rule);
  for (const StepRecord& rec : steps) det.on_step(rec);
  return det.times();
}

}  // namespace balancelab
