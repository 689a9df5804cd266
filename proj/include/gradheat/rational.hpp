#pragma once

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gradheat {

/// Exact rational arithmetic on 64-bit integers.
///
/// Criticality comparisons (e.g. q vs 2p/(p+1)) must never go through
/// floating point, so every comparison and combination here is done with
/// 128-bit intermediates and gcd normalization.  Desk-scale exponents fit
/// comfortably; anything that would overflow 64 bits after normalization
/// throws std::overflow_error instead of silently wrapping.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

  /// Parses "3", "-7", "3/2", "-15/4".  Whitespace is not accepted.
  static Rational parse(std::string_view text) {
    auto slash = text.find('/');
    try {
      if (slash == std::string_view::npos) {
        return Rational(to_int(text));
      }
      return Rational(to_int(text.substr(0, slash)),
                      to_int(text.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("not a rational literal: " +
                                  std::string(text));
    }
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                     i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                     i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }

  /// Exact three-way comparison via 128-bit cross products.
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return !(b < a);
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return !(a < b);
  }

 private:
  using i128 = __int128;

  static std::int64_t to_int(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty integer literal");
    std::size_t pos = 0;
    long long v;
    try {
      v = std::stoll(std::string(s), &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad integer literal");
    }
    if (pos != s.size()) throw std::invalid_argument("bad integer literal");
    return v;
  }

  static Rational from_i128(i128 n, i128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr i128 lo = std::numeric_limits<std::int64_t>::min();
    constexpr i128 hi = std::numeric_limits<std::int64_t>::max();
    if (n < lo || n > hi || d > hi) {
      throw std::overflow_error("rational arithmetic overflow");
    }
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  void normalize() {
    Rational r = from_i128(num_, den_);
    num_ = r.num_;
    den_ = r.den_;
  }

  std::int64_t num_;
  std::int64_t den_;
};

/// A rational value or positive infinity, used for exponents like p_S that
/// degenerate in low dimension.  Infinity compares greater than every finite
/// rational.
class RationalOrInf {
 public:
  RationalOrInf() : finite_(true), value_() {}
  RationalOrInf(Rational v) : finite_(true), value_(v) {}
  static RationalOrInf infinity() {
    RationalOrInf r;
    r.finite_ = false;
    return r;
  }

  bool is_finite() const { return finite_; }
  const Rational& value() const {
    if (!finite_) throw std::domain_error("value() on infinite exponent");
    return value_;
  }
  double to_double() const {
    return finite_ ? value_.to_double()
                   : std::numeric_limits<double>::infinity();
  }
  std::string str() const { return finite_ ? value_.str() : "inf"; }

  friend bool operator==(const RationalOrInf& a, const RationalOrInf& b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.value_ == b.value_;
  }
  friend bool operator<(const RationalOrInf& a, const RationalOrInf& b) {
    if (!a.finite_) return false;
    if (!b.finite_) return true;
    return a.value_ < b.value_;
  }

  friend bool operator<(const Rational& a, const RationalOrInf& b) {
    return RationalOrInf(a) < b;
  }
  friend bool operator<(const RationalOrInf& a, const Rational& b) {
    return a < RationalOrInf(b);
  }

 private:
  bool finite_;
  Rational value_;
};

}  // namespace gradheat
