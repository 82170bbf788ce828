#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace balancelab {

using Int128 = __int128;

std::string int128_to_string(Int128 v);

// Exact rational over 128-bit integers, always normalized (den > 0,
// gcd(|num|, den) == 1). Arithmetic is unchecked: at the scales this
// library targets (loads up to ~2^25, n up to a few thousand) every
// intermediate product fits comfortably in 128 bits.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(long long v) : num_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(Int128 num, Int128 den);

  Int128 num() const { return num_; }
  Int128 den() const { return den_; }

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ <= b.num_ * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

  bool is_integer() const { return den_ == 1; }
  double to_double() const;
  std::string to_string() const;  // "p/q", or just "p" when integral

 private:
  void normalize();

  Int128 num_ = 0;
  Int128 den_ = 1;
};

enum class RoundingRule {
  kHalfAwayFromZero,
  kHalfToEven,
};

inline const char* rounding_rule_name(RoundingRule rule) {
  return rule == RoundingRule::kHalfToEven ? "even" : "away";
}

// Nearest-integer rounding of num/den (den > 0) with an explicit tie rule.
long long round_nearest(Int128 num, Int128 den, RoundingRule rule);
long long round_nearest(const Rational& v, RoundingRule rule);

}  // namespace balancelab
