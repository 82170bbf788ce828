#include "balancelab/rational.hpp"

namespace balancelab {

namespace {

Int128 abs128(Int128 v) { return v < 0 ? -v : v; }

Int128 gcd128(Int128 a, Int128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    Int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

std::string int128_to_string(Int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  char buf[48];
  int pos = 48;
  while (u > 0) {
    buf[--pos] = static_cast<char>('0' + static_cast<int>(u % 10));
    u /= 10;
  }
  std::string out;
  if (neg) out.push_back('-');
  out.append(buf + pos, buf + 48);
  return out;
}

Rational::Rational(Int128 num, Int128 den) : num_(num), den_(den) {
  if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_ == 0) {
    den_ = 1;
    return;
  }
  Int128 g = gcd128(num_, den_);
  num_ /= g;
  den_ /= g;
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational& Rational::operator+=(const Rational& o) {
  num_ = num_ * o.den_ + o.num_ * den_;
  den_ *= o.den_;
  normalize();
  return *this;
}

Rational& Rational::operator-=(const Rational& o) {
  num_ = num_ * o.den_ - o.num_ * den_;
  den_ *= o.den_;
  normalize();
  return *this;
}

Rational& Rational::operator*=(const Rational& o) {
  num_ *= o.num_;
  den_ *= o.den_;
  normalize();
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::invalid_argument("Rational: division by zero");
  num_ *= o.den_;
  den_ *= o.num_;
  normalize();
  return *this;
}

double Rational::to_double() const {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::to_string() const {
  if (den_ == 1) return int128_to_string(num_);
  return int128_to_string(num_) + "/" + int128_to_string(den_);
}

long long round_nearest(Int128 num, Int128 den, RoundingRule rule) {
  if (den == 0) throw std::invalid_argument("round_nearest: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  // Floor division: num = q*den + r with 0 <= r < den.
  Int128 q = num / den;
  Int128 r = num % den;
  if (r < 0) {
    q -= 1;
    r += den;
  }
  Int128 twice = 2 * r;
  if (twice > den) return static_cast<long long>(q + 1);
  if (twice < den) return static_cast<long long>(q);
  switch (rule) {
    case RoundingRule::kHalfAwayFromZero:
      // The value is q + 1/2; away from zero means up for positive values,
      // down (toward q) for negative ones.
      return static_cast<long long>(num > 0 ? q + 1 : q);
    case RoundingRule::kHalfToEven:
      return static_cast<long long>(q % 2 == 0 ? q : q + 1);
  }
  throw std::logic_error("round_nearest: unknown rounding rule");
}

long long round_nearest(const Rational& v, RoundingRule rule) {
  return round_nearest(v.num(), v.den(), rule);
}

}  // namespace balancelab
