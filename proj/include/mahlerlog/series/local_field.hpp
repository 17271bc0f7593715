#pragma once

#include "mahlerlog/ffcore/galois_field.hpp"
#include "mahlerlog/series/laurent.hpp"

#include <string>
#include <vector>

namespace mahlerlog {

/// An element of F_{q^d}((u)) truncated at some power of the uniformizer u,
/// with v_inf(u) = 1/e.  Only the integer u-grid is stored; the ramification
/// index converts u-orders into v_inf values.
class LocalFieldElem {
 public:
  using Series = Laurent<FieldElem>;

  LocalFieldElem() = default;
  LocalFieldElem(Series s, long e) : s_(std::move(s)), e_(e) {
    require(e >= 1, ErrorKind::InvalidArgument, "ramification index must be positive");
    require(s_.var() == 'u', ErrorKind::VariableMismatch, "local field elements are series in u");
  }

  static LocalFieldElem zero(const GaloisField* f, long e, long prec = kExact) {
    return {Series::zero(FieldElem(f, 1), 'u', prec), e};
  }
  static LocalFieldElem one(const GaloisField* f, long e) { return {Series::constant(FieldElem(f, 1), 'u'), e}; }
  static LocalFieldElem monomial(const FieldElem& c, long n, long e) { return {Series::monomial(c, n, 'u'), e}; }
  static LocalFieldElem from_coeffs(const GaloisField* f, long e, long ord, std::vector<FieldElem> coeffs,
                                    long prec = kExact) {
    return {Series(FieldElem(f, 1), 'u', ord, prec, std::move(coeffs)), e};
  }

  const Series& series() const { return s_; }
  long e() const { return e_; }
  const GaloisField* field() const { return s_.one().field(); }
  long ord_u() const { return s_.ord(); }
  long prec() const { return s_.prec(); }
  bool exact() const { return s_.exact(); }
  bool is_zero_on_window() const { return s_.is_zero_on_window(); }

  /// v_inf = (u-adic order)/e; nullopt when the element vanishes on its window.
  Valuation v_inf() const {
    auto o = s_.valuation();
    if (!o) return std::nullopt;
    return Rational(*o, e_);
  }
  /// Known lower bound for v_inf (the precision when zero on window).
  Rational v_lower_bound() const { return Rational(s_.ord() >= kExact ? kExact : s_.ord(), e_); }

  FieldElem digit(long n) const { return s_.coeff(n); }

  LocalFieldElem operator+(const LocalFieldElem& o) const { return {s_ + o.check(*this).s_, e_}; }
  LocalFieldElem operator-(const LocalFieldElem& o) const { return {s_ - o.check(*this).s_, e_}; }
  LocalFieldElem operator-() const { return {-s_, e_}; }
  LocalFieldElem operator*(const LocalFieldElem& o) const { return {s_ * o.check(*this).s_, e_}; }
  LocalFieldElem operator*(const FieldElem& c) const { return {s_.scaled(c), e_}; }
  LocalFieldElem& operator+=(const LocalFieldElem& o) { return *this = *this + o; }
  LocalFieldElem& operator-=(const LocalFieldElem& o) { return *this = *this - o; }
  LocalFieldElem& operator*=(const LocalFieldElem& o) { return *this = *this * o; }

  LocalFieldElem inverse(long abs_cap) const {
    require(!s_.is_zero_on_window(), ErrorKind::DivisionByZero, "inverse of a local element that vanishes on its window");
    return {s_.inverse(abs_cap), e_};
  }
  LocalFieldElem div(const LocalFieldElem& o, long abs_cap) const { return *this * o.inverse(abs_cap); }

  LocalFieldElem pow(long long n, long abs_cap) const {
    if (n < 0) return inverse(abs_cap).pow(-n, abs_cap);
    return {s_.pow(static_cast<unsigned long>(n), abs_cap), e_};
  }

  /// x^{p^k}, computed exactly through the Frobenius.
  LocalFieldElem frobenius_p(unsigned k) const {
    const GaloisField* f = field();
    Series t = s_.map_coeffs([k](const FieldElem& c) { return c.frobenius_p(k); });
    return {t.substitute_power(static_cast<long>(ipow(f->p(), k))), e_};
  }
  /// x^{q^k}
  LocalFieldElem frobenius_q(unsigned k) const { return frobenius_p(field()->m() * k); }

  LocalFieldElem truncated(long p) const { return {s_.truncated(p), e_}; }

  /// Number of u-digits on which *this and o agree (their difference vanishes
  /// modulo u^window).  `equal` is false if a difference is visible.
  typename Series::Agreement compare(const LocalFieldElem& o) const { return s_.compare(o.check(*this).s_); }

  std::string to_string(std::size_t max_terms = 8) const { return s_.to_string(max_terms); }

 private:
  const LocalFieldElem& check(const LocalFieldElem& other) const {
    if (e_ != other.e_) fail(ErrorKind::SpecMismatch, "local elements with different ramification indices");
    return *this;
  }

  Series s_;
  long e_ = 1;
};

}  // namespace mahlerlog
