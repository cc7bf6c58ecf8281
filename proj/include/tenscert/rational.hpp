#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tenscert {

// Exact scalar backend. cpp_rational keeps numerator/denominator coprime,
// so equality and zero tests are exact.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Parses "p/q", "p", or a plain decimal such as "-0.25" into an exact rational.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    if (num.empty() || den.empty())
      throw std::invalid_argument("malformed rational literal: " + text);
    BigInt p(num), q(den);
    if (q == 0) throw std::invalid_argument("zero denominator: " + text);
    return Rational(p, q);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(BigInt(text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  const std::size_t frac_len = text.size() - dot - 1;
  if (digits.empty() || digits == "-" || digits == "+")
    throw std::invalid_argument("malformed rational literal: " + text);
  BigInt p(digits), q(1);
  for (std::size_t i = 0; i < frac_len; ++i) q *= 10;
  return Rational(p, q);
}

// Every finite double is a dyadic rational; the conversion is exact.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
  // 53 bits of mantissa
  const std::int64_t m = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r(m);
  BigInt two(1);
  if (exp >= 0) {
    two <<= exp;
    r *= Rational(two);
  } else {
    two <<= -exp;
    r /= Rational(two);
  }
  return r;
}

inline std::string rational_to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

inline double rational_to_double(const Rational& r) { return r.template convert_to<double>(); }

}  // namespace tenscert
