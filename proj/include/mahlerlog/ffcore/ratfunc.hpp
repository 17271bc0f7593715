#pragma once

#include "mahlerlog/ffcore/poly.hpp"

#include <string>

namespace mahlerlog {

/// An element of F_{q^d}(vartheta), where theta = vartheta^{p^h}.
///
/// Canonical form: gcd(num, den) = 1 and den monic, so equality is a
/// componentwise comparison.  Level h = 0 is the ordinary field F_{q^d}(theta).
class RatFunc {
 public:
  RatFunc() = default;
  RatFunc(Poly num, Poly den, unsigned h = 0) : num_(std::move(num)), den_(std::move(den)), h_(h) { normalize(); }
  RatFunc(Poly num, unsigned h = 0) : num_(std::move(num)), den_(Poly::one(num_.field())), h_(h) {}

  static RatFunc zero(const GaloisField* f, unsigned h = 0) { return RatFunc(Poly(f), h); }
  static RatFunc one(const GaloisField* f, unsigned h = 0) { return RatFunc(Poly::one(f), h); }
  static RatFunc constant(const FieldElem& c, unsigned h = 0) { return RatFunc(Poly::constant(c), h); }
  static RatFunc from_int(const GaloisField* f, long long v, unsigned h = 0) {
    return constant(FieldElem::from_int(*f, v), h);
  }
  /// The variable vartheta itself.
  static RatFunc vartheta(const GaloisField* f, unsigned h = 0) { return RatFunc(Poly::x(f), h); }
  /// theta = vartheta^{p^h}.
  static RatFunc theta(const GaloisField* f, unsigned h = 0) {
    return RatFunc(Poly::monomial(FieldElem(f, 1), ipow(f->p(), h)), h);
  }

  const GaloisField* field() const { return num_.field(); }
  unsigned level() const { return h_; }
  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  RatFunc zero() const { return RatFunc(Poly(field()), h_); }
  RatFunc one() const { return RatFunc(Poly::one(field()), h_); }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }
  bool is_polynomial() const { return den_.is_one(); }
  bool is_constant() const { return num_.is_constant() && den_.is_one(); }

  RatFunc operator+(const RatFunc& o) const {
    check_compatible(o);
    if (den_.is_one() && o.den_.is_one()) return RatFunc(num_ + o.num_, h_);
    if (den_ == o.den_) return RatFunc(num_ + o.num_, den_, h_);
    Poly g = gcd(den_, o.den_);
    if (g.is_one()) return RatFunc(num_ * o.den_ + o.num_ * den_, den_ * o.den_, h_);
    Poly a = o.den_ / g, b = den_ / g;
    return RatFunc(num_ * a + o.num_ * b, den_ * a, h_);
  }
  RatFunc operator-() const {
    RatFunc r = *this;
    r.num_ = -r.num_;
    return r;
  }
  RatFunc operator-(const RatFunc& o) const { return *this + (-o); }
  RatFunc operator*(const RatFunc& o) const {
    check_compatible(o);
    if (num_.is_zero() || o.num_.is_zero()) return zero();
    if (den_.is_one() && o.den_.is_one()) return RatFunc(num_ * o.num_, h_);
    Poly g1 = o.den_.is_one() ? Poly::one(field()) : gcd(num_, o.den_);
    Poly g2 = den_.is_one() ? Poly::one(field()) : gcd(o.num_, den_);
    RatFunc r;
    r.h_ = h_;
    Poly n1 = g1.is_one() ? num_ : num_ / g1;
    Poly d2 = g1.is_one() ? o.den_ : o.den_ / g1;
    Poly n2 = g2.is_one() ? o.num_ : o.num_ / g2;
    Poly d1 = g2.is_one() ? den_ : den_ / g2;
    r.num_ = n1 * n2;
    r.den_ = d1 * d2;
    r.fix_sign();
    return r;
  }
  RatFunc operator*(const FieldElem& c) const {
    if (c.is_zero()) return zero();
    RatFunc r = *this;
    r.num_ = r.num_ * c;
    return r;
  }
  RatFunc inverse() const {
    require(!is_zero(), ErrorKind::DivisionByZero, "inverse of zero rational function");
    RatFunc r;
    r.h_ = h_;
    r.num_ = den_;
    r.den_ = num_;
    r.fix_sign();
    return r;
  }
  RatFunc operator/(const RatFunc& o) const {
    require(!o.is_zero(), ErrorKind::DivisionByZero, "division by zero rational function");
    return *this * o.inverse();
  }
  RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
  RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
  RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
  RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

  RatFunc pow(long long e) const {
    if (e < 0) return inverse().pow(-e);
    RatFunc r;
    r.h_ = h_;
    r.num_ = num_.pow(static_cast<unsigned long>(e));
    r.den_ = den_.pow(static_cast<unsigned long>(e));
    return r;
  }

  /// Valuation at infinity normalised by v(theta) = -1; +inf for zero.
  Valuation v_inf() const {
    if (is_zero()) return std::nullopt;
    return Rational(den_.degree() - num_.degree(), static_cast<long long>(ipow(field()->p(), h_)));
  }

  /// Derivative with respect to theta (level 0 only).
  RatFunc deriv_theta() const {
    require(h_ == 0, ErrorKind::UnsupportedRootLevel, "derivation requires level h = 0");
    if (den_.is_one()) return RatFunc(num_.derivative(), 0);
    return RatFunc(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_, 0);
  }

  /// Coefficientwise x -> x^q on F_{q^d}; vartheta is fixed.
  RatFunc sigma_coeff(unsigned k = 1) const {
    const GaloisField* f = field();
    auto fr = [f, k](GaloisField::Code c) { return f->frobenius_q(c, k); };
    RatFunc r;
    r.h_ = h_;
    r.num_ = num_.map_codes(fr);
    r.den_ = den_.map_codes(fr);
    return r;
  }

  /// The p^k-th power, computed through the Frobenius.
  RatFunc pow_p(unsigned k) const {
    const GaloisField* f = field();
    const std::size_t e = ipow(f->p(), k);
    auto fr = [f, k](GaloisField::Code c) { return f->frobenius_p(c, k); };
    RatFunc r;
    r.h_ = h_;
    r.num_ = num_.map_codes(fr).compose_power(e);
    r.den_ = den_.map_codes(fr).compose_power(e);
    return r;
  }

  /// Re-express at a deeper level h' >= h (vartheta_old = vartheta_new^{p^{h'-h}}).
  RatFunc lift(unsigned new_level) const {
    require(new_level >= h_, ErrorKind::InvalidArgument, "cannot lower the root level");
    if (new_level == h_) return *this;
    const std::size_t e = ipow(field()->p(), new_level - h_);
    RatFunc r;
    r.h_ = new_level;
    r.num_ = num_.compose_power(e);
    r.den_ = den_.compose_power(e);
    return r;
  }

  /// Evaluate at vartheta = x; DivisionByZero at a pole.
  FieldElem eval(const FieldElem& x) const {
    FieldElem dv = den_.eval(x);
    require(!dv.is_zero(), ErrorKind::DivisionByZero, "pole at evaluation point");
    return num_.eval(x) / dv;
  }

  /// True when every coefficient lies in the constant field F_q.
  bool has_constant_field_coefficients() const {
    const GaloisField* f = field();
    for (auto c : num_.codes())
      if (!f->in_constant_field(c)) return false;
    for (auto c : den_.codes())
      if (!f->in_constant_field(c)) return false;
    return true;
  }

  bool operator==(const RatFunc& o) const { return h_ == o.h_ && num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const RatFunc& o) const { return !(*this == o); }

  std::string to_string() const {
    const std::string var = h_ == 0 ? "theta" : "vt";
    if (den_.is_one()) return num_.to_string(var);
    return "(" + num_.to_string(var) + ")/(" + den_.to_string(var) + ")";
  }

 private:
  void check_compatible(const RatFunc& o) const {
    if (field() != o.field() || h_ != o.h_) fail(ErrorKind::SpecMismatch, "rational functions over different fields or levels");
  }

  void fix_sign() {
    if (den_.lead().is_one()) return;
    FieldElem li = den_.lead().inverse();
    den_ = den_ * li;
    num_ = num_ * li;
  }

  void normalize() {
    require(!den_.is_zero(), ErrorKind::DivisionByZero, "zero denominator");
    if (num_.is_zero()) {
      den_ = Poly::one(num_.field());
      return;
    }
    if (!den_.is_constant()) {
      Poly g = gcd(num_, den_);
      if (!g.is_one()) {
        num_ = num_ / g;
        den_ = den_ / g;
      }
    }
    fix_sign();
  }

  Poly num_;
  Poly den_;
  unsigned h_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const RatFunc& a) { return os << a.to_string(); }

}  // namespace mahlerlog
