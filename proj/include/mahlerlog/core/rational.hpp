#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

namespace mahlerlog {

using Rational = boost::rational<long long>;

/// A valuation is a rational number or +infinity (represented by nullopt).
using Valuation = std::optional<Rational>;

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline std::string to_string(const Valuation& v) { return v ? to_string(*v) : std::string("inf"); }

inline long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

inline long long floor(const Rational& r) { return floor_div(r.numerator(), r.denominator()); }
inline long long ceil(const Rational& r) { return ceil_div(r.numerator(), r.denominator()); }

/// Saturating sentinel for "known to all orders" in precision bookkeeping.
inline constexpr long kExact = std::numeric_limits<long>::max() / 4;

inline long sat_add(long a, long b) {
  if (a >= kExact || b >= kExact) return kExact;
  long r = a + b;
  return r >= kExact ? kExact : r;
}

inline long sat_mul(long a, long factor) {
  if (a >= kExact) return kExact;
  if (factor != 0 && a > 0 && a > kExact / factor) return kExact;
  return a * factor;
}

inline unsigned long ipow(unsigned long base, unsigned exp) {
  unsigned long r = 1;
  while (exp--) r *= base;
  return r;
}

}  // namespace mahlerlog
