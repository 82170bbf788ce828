#include "balancelab/load_vector.hpp"

#include <algorithm>
#include <stdexcept>

namespace balancelab {

long long LoadVector::max_load() const {
  if (loads.empty()) throw std::invalid_argument("LoadVector: empty");
  return *std::max_element(loads.begin(), loads.end());
}

long long LoadVector::min_load() const {
  if (loads.empty()) throw std::invalid_argument("LoadVector: empty");
  return *std::min_element(loads.begin(), loads.end());
}

DerivedQuantities derive(const LoadVector& lv, RoundingRule rule) {
  if (lv.n() < 1) throw std::invalid_argument("derive: empty load vector");
  DerivedQuantities d;
  d.average = Rational(lv.total(), lv.n());
  d.rounded_average = round_nearest(lv.total(), lv.n(), rule);
  d.discrepancy = lv.discrepancy();
  return d;
}

Rational average_load(const LoadVector& lv) {
  if (lv.n() < 1) throw std::invalid_argument("average_load: empty load vector");
  return Rational(lv.total(), lv.n());
}

long long rounded_average(const LoadVector& lv, RoundingRule rule) {
  if (lv.n() < 1) throw std::invalid_argument("rounded_average: empty load vector");
  return round_nearest(lv.total(), lv.n(), rule);
}

std::uint64_t fnv1a_digest(const LoadVector& lv) {
  std::uint64_t h = 1469598103934665603ULL;
  for (long long v : lv.loads) {
    std::uint64_t u = static_cast<std::uint64_t>(v);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (u >> (8 * byte)) & 0xffu;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace balancelab
