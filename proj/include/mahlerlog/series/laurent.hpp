#pragma once

#include "mahlerlog/core/error.hpp"
#include "mahlerlog/core/rational.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace mahlerlog {

/// A truncated Laurent series sum_{n >= ord} c_n X^n known modulo X^prec.
///
/// `prec == kExact` marks a finitely supported series that is known exactly.
/// Every operation returns the window on which its coefficients are
/// guaranteed; nothing outside that window is ever reported.
///
/// The coefficient type C must provide zero(), one(), is_zero(), +, -, *,
/// unary -, inverse() and ==.
template <class C>
class Laurent {
 public:
  Laurent() = default;

  Laurent(C one, char var, long ord, long prec, std::vector<C> coeffs)
      : one_(std::move(one)), var_(var), ord_(ord), prec_(prec), c_(std::move(coeffs)) {
    normalize();
  }

  static Laurent zero(const C& one, char var, long prec = kExact) { return Laurent(one, var, prec, prec, {}); }
  static Laurent constant(const C& c, char var) { return Laurent(c.one(), var, 0, kExact, {c}); }
  static Laurent monomial(const C& c, long n, char var) { return Laurent(c.one(), var, n, kExact, {c}); }

  const C& one() const { return one_; }
  C zero_coeff() const { return one_.zero(); }
  char var() const { return var_; }
  /// First exponent that may be nonzero (equals prec() when zero on window).
  long ord() const { return ord_; }
  long prec() const { return prec_; }
  bool exact() const { return prec_ >= kExact; }
  bool is_zero_on_window() const { return c_.empty(); }
  /// Order of vanishing, or nullopt when every known coefficient vanishes.
  std::optional<long> valuation() const {
    if (c_.empty()) return std::nullopt;
    return ord_;
  }
  /// One past the largest stored exponent.
  long support_end() const { return ord_ + static_cast<long>(c_.size()); }
  const std::vector<C>& stored() const { return c_; }

  C coeff(long n) const {
    require(n < prec_, ErrorKind::PrecisionExhausted,
            "coefficient " + std::to_string(n) + " outside known window (prec " + std::to_string(prec_) + ")");
    if (n < ord_ || n >= support_end()) return one_.zero();
    return c_[static_cast<std::size_t>(n - ord_)];
  }
  C leading() const {
    require(!c_.empty(), ErrorKind::NotInvertible, "series is zero on its window");
    return c_.front();
  }

  Laurent truncated(long p) const {
    if (p >= prec_) return *this;
    Laurent r = *this;
    r.prec_ = p;
    if (p <= r.ord_) {
      r.c_.clear();
      r.ord_ = p;
    } else if (r.support_end() > p) {
      r.c_.resize(static_cast<std::size_t>(p - r.ord_));
    }
    r.normalize();
    return r;
  }

  Laurent operator+(const Laurent& o) const { return combine(o, false); }
  Laurent operator-(const Laurent& o) const { return combine(o, true); }
  Laurent operator-() const {
    Laurent r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }

  Laurent operator*(const Laurent& o) const {
    check_var(o);
    const long p = std::min(sat_add(ord_, o.prec_), sat_add(o.ord_, prec_));
    if (c_.empty() || o.c_.empty()) return Laurent(one_, var_, p, p, {});
    const long base = ord_ + o.ord_;
    long len = static_cast<long>(c_.size() + o.c_.size() - 1);
    if (p < kExact) len = std::min(len, p - base);
    if (len <= 0) return Laurent(one_, var_, p, p, {});
    std::vector<C> r(static_cast<std::size_t>(len), one_.zero());
    const auto na = nonzero_indices();
    const auto nb = o.nonzero_indices();
    for (std::size_t i : na) {
      for (std::size_t j : nb) {
        if (static_cast<long>(i + j) >= len) break;
        r[i + j] += c_[i] * o.c_[j];
      }
    }
    return Laurent(one_, var_, base, p, std::move(r));
  }

  Laurent scaled(const C& s) const {
    if (s.is_zero()) return Laurent(one_, var_, prec_ >= kExact ? kExact : prec_, prec_, {});
    Laurent r = *this;
    for (auto& x : r.c_) x = x * s;
    return r;
  }

  /// Multiply by X^k.
  Laurent shifted(long k) const {
    Laurent r = *this;
    r.ord_ += k;
    r.prec_ = r.prec_ >= kExact ? kExact : r.prec_ + k;
    if (r.c_.empty()) r.ord_ = r.prec_;
    return r;
  }

  /// Multiplicative inverse.  For exact series with more than one term the
  /// result is computed modulo X^abs_cap.
  Laurent inverse(long abs_cap = kExact) const {
    require(!c_.empty(), ErrorKind::NotInvertible, "series has no nonzero coefficient on its window");
    const long o = ord_;
    if (exact() && c_.size() == 1) return Laurent(one_, var_, -o, kExact, {c_[0].inverse()});
    long rel = exact() ? abs_cap + o : prec_ - o;
    if (!exact() && abs_cap < kExact) rel = std::min(rel, abs_cap + o);
    require(rel > 0, ErrorKind::PrecisionExhausted, "no relative precision left for inversion");
    std::vector<C> b(static_cast<std::size_t>(rel), one_.zero());
    const C b0 = c_[0].inverse();
    b[0] = b0;
    const auto na = nonzero_indices();
    for (long n = 1; n < rel; ++n) {
      C s = one_.zero();
      for (std::size_t i : na) {
        if (i == 0) continue;
        if (static_cast<long>(i) > n) break;
        s += c_[i] * b[static_cast<std::size_t>(n) - i];
      }
      if (!s.is_zero()) b[static_cast<std::size_t>(n)] = -(s * b0);
    }
    return Laurent(one_, var_, -o, -o + rel, std::move(b));
  }

  /// Substitution X -> X^r (r >= 1): exponents and precision scale by r.
  Laurent substitute_power(long r) const {
    require(r >= 1, ErrorKind::InvalidArgument, "substitution exponent must be positive");
    if (r == 1) return *this;
    Laurent out;
    out.one_ = one_;
    out.var_ = var_;
    out.ord_ = ord_ * r;
    out.prec_ = sat_mul(prec_, r);
    if (c_.empty()) {
      out.ord_ = out.prec_;
      return out;
    }
    out.c_.assign((c_.size() - 1) * static_cast<std::size_t>(r) + 1, one_.zero());
    for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i * static_cast<std::size_t>(r)] = c_[i];
    return out;
  }

  template <class F>
  Laurent map_coeffs(F fn) const {
    Laurent r = *this;
    for (auto& x : r.c_) x = fn(x);
    r.one_ = fn(one_);
    r.normalize();
    return r;
  }

  /// Power with non-negative exponent by repeated squaring.  `abs_cap`
  /// truncates intermediate results.
  Laurent pow(unsigned long e, long abs_cap = kExact) const {
    Laurent r = constant(one_, var_);
    Laurent b = truncated(abs_cap);
    while (e) {
      if (e & 1) r = (r * b).truncated(abs_cap);
      e >>= 1;
      if (e) b = (b * b).truncated(abs_cap);
    }
    return r;
  }

  /// Lower bound for the precision of agreement: returns the window on which
  /// *this - o vanishes, or the first exponent where they differ.
  struct Agreement {
    bool equal;    // difference vanishes on the common window
    long window;   // common window end (exclusive)
    long first_diff;  // exponent of first difference (valid when !equal)
  };
  Agreement compare(const Laurent& o) const {
    Laurent d = *this - o;
    if (d.is_zero_on_window()) return {true, d.prec_, d.prec_};
    return {false, d.prec_, d.ord_};
  }

  std::vector<std::size_t> nonzero_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (!c_[i].is_zero()) out.push_back(i);
    return out;
  }

  std::size_t nonzero_count() const {
    std::size_t n = 0;
    for (const auto& x : c_)
      if (!x.is_zero()) ++n;
    return n;
  }

  std::string to_string(std::size_t max_terms = 12) const {
    std::string s;
    std::size_t shown = 0;
    for (std::size_t i = 0; i < c_.size() && shown < max_terms; ++i) {
      if (c_[i].is_zero()) continue;
      if (!s.empty()) s += " + ";
      s += "(" + c_[i].to_string() + ")*" + var_ + "^" + std::to_string(ord_ + static_cast<long>(i));
      ++shown;
    }
    if (s.empty()) s = "0";
    if (shown == max_terms && nonzero_count() > max_terms) s += " + ...";
    if (!exact()) s += " + O(" + std::string(1, var_) + "^" + std::to_string(prec_) + ")";
    return s;
  }

 private:
  void check_var(const Laurent& o) const {
    if (var_ != o.var_) fail(ErrorKind::VariableMismatch, std::string("series in ") + var_ + " and " + o.var_);
  }

  Laurent combine(const Laurent& o, bool subtract) const {
    check_var(o);
    const long p = std::min(prec_, o.prec_);
    if (c_.empty() && o.c_.empty()) return Laurent(one_, var_, p, p, {});
    long lo = std::min(c_.empty() ? o.ord_ : ord_, o.c_.empty() ? ord_ : o.ord_);
    long hi = std::max(c_.empty() ? lo : support_end(), o.c_.empty() ? lo : o.support_end());
    hi = std::min(hi, p);
    if (hi <= lo) return Laurent(one_, var_, p, p, {});
    std::vector<C> r(static_cast<std::size_t>(hi - lo), one_.zero());
    for (std::size_t i = 0; i < c_.size(); ++i) {
      long n = ord_ + static_cast<long>(i);
      if (n >= hi) break;
      r[static_cast<std::size_t>(n - lo)] = c_[i];
    }
    for (std::size_t i = 0; i < o.c_.size(); ++i) {
      long n = o.ord_ + static_cast<long>(i);
      if (n >= hi) break;
      auto& slot = r[static_cast<std::size_t>(n - lo)];
      slot = subtract ? slot - o.c_[i] : slot + o.c_[i];
    }
    return Laurent(one_, var_, lo, p, std::move(r));
  }

  void normalize() {
    if (prec_ < kExact && ord_ + static_cast<long>(c_.size()) > prec_) {
      if (prec_ <= ord_) {
        c_.clear();
      } else {
        c_.resize(static_cast<std::size_t>(prec_ - ord_));
      }
    }
    std::size_t lead = 0;
    while (lead < c_.size() && c_[lead].is_zero()) ++lead;
    if (lead == c_.size()) {
      c_.clear();
      ord_ = prec_;
      return;
    }
    if (lead > 0) {
      c_.erase(c_.begin(), c_.begin() + static_cast<long>(lead));
      ord_ += static_cast<long>(lead);
    }
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }

  C one_{};
  char var_ = 'Z';
  long ord_ = kExact;
  long prec_ = kExact;
  std::vector<C> c_;
};

}  // namespace mahlerlog
