#pragma once

#include "mahlerlog/ffcore/galois_field.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

namespace mahlerlog {

/// Dense univariate polynomial over F_{q^d}, coefficients low -> high, no
/// trailing zeros.
class Poly {
 public:
  using Code = GaloisField::Code;

  Poly() = default;
  explicit Poly(const GaloisField* f) : f_(f) {}
  Poly(const GaloisField* f, std::vector<Code> coeffs) : f_(f), c_(std::move(coeffs)) { trim(); }

  static Poly constant(const FieldElem& c) { return Poly(c.field(), {c.code()}); }
  static Poly one(const GaloisField* f) { return Poly(f, {1}); }
  static Poly monomial(const FieldElem& c, std::size_t n) {
    std::vector<Code> v(n + 1, 0);
    v[n] = c.code();
    return Poly(c.field(), std::move(v));
  }
  static Poly x(const GaloisField* f) { return Poly(f, {0, 1}); }
  /// Build from small integers, reduced into the prime field.
  static Poly from_ints(const GaloisField* f, std::initializer_list<long long> ints) {
    std::vector<Code> v;
    for (long long i : ints) v.push_back(f->from_int(i));
    return Poly(f, std::move(v));
  }

  const GaloisField* field() const { return f_; }
  const std::vector<Code>& codes() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
  bool is_constant() const { return c_.size() <= 1; }
  /// Degree, with deg 0 = -1.
  long degree() const { return static_cast<long>(c_.size()) - 1; }
  FieldElem coeff(std::size_t i) const { return {f_, i < c_.size() ? c_[i] : 0}; }
  FieldElem lead() const { return {f_, c_.empty() ? 0 : c_.back()}; }
  /// Lowest exponent with a nonzero coefficient (-1 for zero).
  long low_degree() const {
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != 0) return static_cast<long>(i);
    return -1;
  }

  Poly zero() const { return Poly(f_); }

  Poly operator+(const Poly& o) const {
    const auto& a = c_.size() >= o.c_.size() ? c_ : o.c_;
    const auto& b = c_.size() >= o.c_.size() ? o.c_ : c_;
    std::vector<Code> r(a);
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = f_->add(r[i], b[i]);
    return Poly(f_, std::move(r));
  }
  Poly operator-() const {
    std::vector<Code> r(c_);
    for (auto& x : r) x = f_->neg(x);
    return Poly(f_, std::move(r));
  }
  Poly operator-(const Poly& o) const {
    std::vector<Code> r(std::max(c_.size(), o.c_.size()), 0);
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] = c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] = f_->sub(r[i], o.c_[i]);
    return Poly(f_, std::move(r));
  }
  Poly operator*(const Poly& o) const {
    if (c_.empty() || o.c_.empty()) return Poly(f_);
    if (c_.size() == 1 && c_[0] == 1) return o;
    if (o.c_.size() == 1 && o.c_[0] == 1) return *this;
    std::vector<Code> r(c_.size() + o.c_.size() - 1, 0);
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      for (std::size_t j = 0; j < o.c_.size(); ++j) {
        if (o.c_[j] == 0) continue;
        r[i + j] = f_->add(r[i + j], f_->mul(c_[i], o.c_[j]));
      }
    }
    return Poly(f_, std::move(r));
  }
  Poly operator*(const FieldElem& s) const {
    if (s.is_zero()) return Poly(f_);
    std::vector<Code> r(c_);
    for (auto& x : r) x = f_->mul(x, s.code());
    return Poly(f_, std::move(r));
  }
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  /// Euclidean division: returns (quotient, remainder).
  std::pair<Poly, Poly> divmod(const Poly& b) const {
    require(!b.is_zero(), ErrorKind::DivisionByZero, "polynomial division by zero");
    if (degree() < b.degree()) return {Poly(f_), *this};
    std::vector<Code> r(c_);
    std::vector<Code> quo(c_.size() - b.c_.size() + 1, 0);
    const Code lead_inv = f_->inv(b.c_.back());
    const std::size_t nb = b.c_.size() - 1;
    for (std::size_t k = quo.size(); k-- > 0;) {
      const Code top = r[k + nb];
      if (top == 0) continue;
      const Code coef = f_->mul(top, lead_inv);
      quo[k] = coef;
      for (std::size_t i = 0; i <= nb; ++i) r[k + i] = f_->sub(r[k + i], f_->mul(coef, b.c_[i]));
    }
    r.resize(nb);
    return {Poly(f_, std::move(quo)), Poly(f_, std::move(r))};
  }
  Poly operator/(const Poly& b) const { return divmod(b).first; }
  Poly operator%(const Poly& b) const { return divmod(b).second; }

  Poly monic() const {
    if (is_zero() || c_.back() == 1) return *this;
    return *this * lead().inverse();
  }

  /// d/dx
  Poly derivative() const {
    if (c_.size() <= 1) return Poly(f_);
    std::vector<Code> r(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = f_->mul(c_[i], f_->from_int(static_cast<long long>(i)));
    return Poly(f_, std::move(r));
  }

  /// x -> x^n
  Poly compose_power(std::size_t n) const {
    if (n == 1 || c_.size() <= 1) return *this;
    std::vector<Code> r((c_.size() - 1) * n + 1, 0);
    for (std::size_t i = 0; i < c_.size(); ++i) r[i * n] = c_[i];
    return Poly(f_, std::move(r));
  }

  /// Apply a map to every coefficient (used for Frobenius twists).
  template <class F>
  Poly map_codes(F fn) const {
    std::vector<Code> r(c_);
    for (auto& x : r) x = fn(x);
    return Poly(f_, std::move(r));
  }

  FieldElem eval(const FieldElem& x) const {
    Code acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = f_->add(f_->mul(acc, x.code()), c_[i]);
    return {f_, acc};
  }

  Poly pow(unsigned long e) const {
    Poly r = one(f_), b = *this;
    while (e) {
      if (e & 1) r = r * b;
      e >>= 1;
      if (e) b = b * b;
    }
    return r;
  }

  bool operator==(const Poly& o) const { return c_ == o.c_; }
  bool operator!=(const Poly& o) const { return c_ != o.c_; }
  bool operator<(const Poly& o) const {
    if (c_.size() != o.c_.size()) return c_.size() < o.c_.size();
    return std::lexicographical_compare(c_.rbegin(), c_.rend(), o.c_.rbegin(), o.c_.rend());
  }

  std::string to_string(const std::string& var = "T") const {
    if (c_.empty()) return "0";
    std::string s;
    for (std::size_t i = c_.size(); i-- > 0;) {
      if (c_[i] == 0) continue;
      if (!s.empty()) s += " + ";
      FieldElem c{f_, c_[i]};
      if (i == 0) {
        s += c.to_string();
      } else {
        if (!c.is_one()) s += c.to_string() + "*";
        s += var;
        if (i > 1) s += "^" + std::to_string(i);
      }
    }
    return s;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  const GaloisField* f_ = nullptr;
  std::vector<Code> c_;
};

/// Monic gcd; gcd(0, 0) = 0.
inline Poly gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

inline Poly lcm(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return a.zero();
  return ((a / gcd(a, b)) * b).monic();
}

/// (a^e) mod m
inline Poly powmod(Poly a, unsigned long long e, const Poly& m) {
  Poly r = Poly::one(a.field()) % m;
  a = a % m;
  while (e) {
    if (e & 1) r = (r * a) % m;
    e >>= 1;
    if (e) a = (a * a) % m;
  }
  return r;
}

}  // namespace mahlerlog
