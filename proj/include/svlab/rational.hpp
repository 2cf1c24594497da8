#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "svlab/error.hpp"

namespace svlab {

// Exact rational with a small denominator. Model exponents are stored this
// way so that family discriminants (1+alpha-2*beta etc.) are tested exactly,
// never through a floating-point epsilon.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num(n), den(1) {}
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) fail(Errc::NonFiniteParameter, "rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  bool is(std::int64_t n, std::int64_t d = 1) const {
    Rational r(n, d);
    return num == r.num && den == r.den;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend Rational operator*(std::int64_t k, const Rational& a) { return Rational(k * a.num, a.den); }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

// Parses "p/q", plain integers, or simple decimals ("0.5"). Decimals are
// converted to the exact rational when the denominator stays small.
Rational parse_rational(const std::string& text);

}  // namespace svlab
