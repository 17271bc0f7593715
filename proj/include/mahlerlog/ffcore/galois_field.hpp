#pragma once

#include "mahlerlog/core/error.hpp"
#include "mahlerlog/core/rational.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace mahlerlog {

namespace detail {

// Dense polynomials over the prime field F_p, coefficients low -> high.
using PrimePoly = std::vector<unsigned>;

inline void trim(PrimePoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline unsigned inv_mod_p(unsigned a, unsigned p) {
  unsigned r = 1, b = a % p, e = p - 2;
  while (e) {
    if (e & 1) r = static_cast<unsigned>((1ull * r * b) % p);
    b = static_cast<unsigned>((1ull * b * b) % p);
    e >>= 1;
  }
  return r;
}

inline PrimePoly mod_prime_poly(PrimePoly a, const PrimePoly& f, unsigned p) {
  trim(a);
  const std::size_t n = f.size() - 1;
  const unsigned lead_inv = inv_mod_p(f.back(), p);
  while (a.size() > n) {
    const unsigned c = static_cast<unsigned>((1ull * a.back() * lead_inv) % p);
    const std::size_t shift = a.size() - 1 - n;
    for (std::size_t i = 0; i <= n; ++i) {
      a[shift + i] = static_cast<unsigned>((a[shift + i] + 1ull * (p - c) * f[i]) % p);
    }
    trim(a);
  }
  return a;
}

inline PrimePoly mulmod_prime_poly(const PrimePoly& a, const PrimePoly& b, const PrimePoly& f, unsigned p) {
  if (a.empty() || b.empty()) return {};
  PrimePoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = static_cast<unsigned>((r[i + j] + 1ull * a[i] * b[j]) % p);
  return mod_prime_poly(std::move(r), f, p);
}

inline PrimePoly gcd_prime_poly(PrimePoly a, PrimePoly b, unsigned p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    a = mod_prime_poly(std::move(a), b, p);
    std::swap(a, b);
  }
  return a;
}

inline bool is_prime(unsigned n) {
  if (n < 2) return false;
  for (unsigned i = 2; i * i <= n; ++i)
    if (n % i == 0) return false;
  return true;
}

inline std::vector<unsigned> prime_divisors(unsigned n) {
  std::vector<unsigned> out;
  for (unsigned r = 2; r <= n; ++r) {
    if (n % r == 0) {
      out.push_back(r);
      while (n % r == 0) n /= r;
    }
  }
  return out;
}

// Rabin's irreducibility test over F_p.
inline bool is_irreducible_prime_poly(PrimePoly f, unsigned p) {
  trim(f);
  if (f.size() < 2) return false;
  const unsigned n = static_cast<unsigned>(f.size() - 1);
  if (n == 1) return true;
  auto frob_iter = [&](unsigned times) {
    PrimePoly x{0, 1};
    for (unsigned t = 0; t < times; ++t) {
      PrimePoly r{1}, b = x;
      unsigned e = p;
      while (e) {
        if (e & 1) r = mulmod_prime_poly(r, b, f, p);
        b = mulmod_prime_poly(b, b, f, p);
        e >>= 1;
      }
      x = r;
    }
    return x;
  };
  auto minus_x = [&](PrimePoly a) {
    if (a.size() < 2) a.resize(2, 0);
    a[1] = (a[1] + p - 1) % p;
    trim(a);
    return a;
  };
  if (!minus_x(frob_iter(n)).empty()) return false;
  for (unsigned r : prime_divisors(n)) {
    PrimePoly g = gcd_prime_poly(minus_x(frob_iter(n / r)), f, p);
    if (g.size() != 1) return false;
  }
  return true;
}

}  // namespace detail

/// The finite field F_{q^d} (q = p^m) presented as F_p[x]/(modulus).
///
/// Elements are coded as integers whose base-p digits are the coordinates on
/// 1, x, ..., x^{md-1}.  Multiplication goes through discrete log tables, so
/// the order is limited to 2^20.
class GaloisField {
 public:
  using Code = std::uint32_t;

  static std::shared_ptr<const GaloisField> make(unsigned p, unsigned m, unsigned d,
                                                 std::vector<unsigned> modulus = {}) {
    require(detail::is_prime(p), ErrorKind::InvalidArgument, "characteristic must be prime");
    require(m >= 1 && d >= 1, ErrorKind::InvalidArgument, "m and d must be positive");
    const unsigned n = m * d;
    if (modulus.empty()) modulus = default_modulus(p, n);
    for (auto& c : modulus) c %= p;
    detail::trim(modulus);
    require(modulus.size() == n + 1, ErrorKind::InvalidArgument, "modulus must have degree m*d");
    require(modulus.back() == 1, ErrorKind::InvalidArgument, "modulus must be monic");
    require(detail::is_irreducible_prime_poly(modulus, p), ErrorKind::InvalidArgument,
            "modulus is not irreducible over F_p");

    static std::mutex mu;
    static std::map<std::tuple<unsigned, unsigned, unsigned, std::vector<unsigned>>,
                    std::shared_ptr<const GaloisField>>
        registry;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(p, m, d, modulus);
    auto it = registry.find(key);
    if (it != registry.end()) return it->second;
    auto field = std::shared_ptr<const GaloisField>(new GaloisField(p, m, d, modulus));
    registry.emplace(std::move(key), field);
    return field;
  }

  /// Lexicographically first monic irreducible polynomial of degree n over F_p.
  static std::vector<unsigned> default_modulus(unsigned p, unsigned n) {
    std::vector<unsigned> f(n + 1, 0);
    f[n] = 1;
    if (n == 1) return f;
    unsigned long total = ipow(p, n);
    for (unsigned long c = 0; c < total; ++c) {
      unsigned long v = c;
      for (unsigned i = 0; i < n; ++i) {
        f[i] = static_cast<unsigned>(v % p);
        v /= p;
      }
      if (f[0] != 0 && detail::is_irreducible_prime_poly(f, p)) return f;
    }
    fail(ErrorKind::InvalidArgument, "no irreducible polynomial found");
  }

  unsigned p() const { return p_; }
  unsigned m() const { return m_; }
  unsigned d() const { return d_; }
  unsigned degree() const { return n_; }
  /// q = p^m, the size of the constant field of k = F_q(theta).
  unsigned long q() const { return q_; }
  /// q^d, the number of elements.
  unsigned long order() const { return order_; }
  const std::vector<unsigned>& modulus() const { return modulus_; }

  Code add(Code a, Code b) const {
    if (!add_table_.empty()) return add_table_[a * order_ + b];
    if (n_ == 1) return static_cast<Code>((a + b) % p_);
    Code r = 0, pw = 1;
    for (unsigned i = 0; i < n_; ++i) {
      r += static_cast<Code>(((a % p_) + (b % p_)) % p_) * pw;
      a /= p_;
      b /= p_;
      pw *= p_;
    }
    return r;
  }
  Code neg(Code a) const { return neg_table_[a]; }
  Code sub(Code a, Code b) const { return add(a, neg_table_[b]); }
  Code mul(Code a, Code b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  Code inv(Code a) const {
    require(a != 0, ErrorKind::DivisionByZero, "inverse of zero field element");
    return exp_[(order_ - 1 - log_[a]) % (order_ - 1)];
  }
  Code div(Code a, Code b) const { return mul(a, inv(b)); }
  Code pow(Code a, long long e) const {
    if (a == 0) {
      require(e >= 0, ErrorKind::DivisionByZero, "negative power of zero");
      return e == 0 ? 1 : 0;
    }
    const long long n = static_cast<long long>(order_ - 1);
    long long l = (static_cast<long long>(log_[a]) * (e % n)) % n;
    if (l < 0) l += n;
    return exp_[l];
  }
  /// x -> x^{p^k}
  Code frobenius_p(Code a, unsigned k = 1) const {
    for (unsigned i = 0; i < k % n_; ++i) a = frob_p_table_[a];
    return a;
  }
  /// x -> x^{q^k}
  Code frobenius_q(Code a, unsigned k = 1) const { return frobenius_p(a, (m_ * k) % n_); }
  /// Frobenius inverse: the unique y with y^q = a.
  Code frobenius_q_inverse(Code a) const { return frobenius_p(a, (n_ - (m_ % n_)) % n_); }

  bool in_constant_field(Code a) const { return frobenius_q(a) == a; }

  Code from_int(long long v) const {
    long long r = v % static_cast<long long>(p_);
    if (r < 0) r += p_;
    return static_cast<Code>(r);
  }
  Code from_digits(std::span<const unsigned> digits) const {
    require(digits.size() <= n_, ErrorKind::InvalidArgument, "too many digits for field element");
    Code r = 0, pw = 1;
    for (unsigned dgt : digits) {
      r += static_cast<Code>(dgt % p_) * pw;
      pw *= p_;
    }
    return r;
  }
  std::vector<unsigned> digits(Code a) const {
    std::vector<unsigned> out(n_);
    for (unsigned i = 0; i < n_; ++i) {
      out[i] = a % p_;
      a /= p_;
    }
    return out;
  }
  /// Primitive element used by the log tables.
  Code generator() const { return exp_[1]; }

  /// Elements of the constant field F_q, in increasing code order.
  std::vector<Code> constant_field_elements() const {
    std::vector<Code> out;
    for (Code c = 0; c < order_; ++c)
      if (in_constant_field(c)) out.push_back(c);
    return out;
  }

 private:
  GaloisField(unsigned p, unsigned m, unsigned d, std::vector<unsigned> modulus)
      : p_(p), m_(m), d_(d), n_(m * d), q_(ipow(p, m)), order_(ipow(p, m * d)), modulus_(std::move(modulus)) {
    require(order_ <= (1ul << 20), ErrorKind::InvalidArgument, "field too large for table arithmetic");
    build_tables();
  }

  detail::PrimePoly to_poly(Code a) const {
    detail::PrimePoly r(n_);
    for (unsigned i = 0; i < n_; ++i) {
      r[i] = a % p_;
      a /= p_;
    }
    detail::trim(r);
    return r;
  }
  Code from_poly(const detail::PrimePoly& a) const {
    Code r = 0, pw = 1;
    for (unsigned i = 0; i < a.size(); ++i) {
      r += a[i] * pw;
      pw *= p_;
    }
    return r;
  }

  void build_tables() {
    const unsigned long Q = order_;
    neg_table_.resize(Q);
    for (Code a = 0; a < Q; ++a) {
      auto dg = digits(a);
      for (auto& x : dg) x = (p_ - x) % p_;
      neg_table_[a] = from_digits(dg);
    }
    if (Q <= 1024) {
      add_table_.resize(Q * Q);
      for (Code a = 0; a < Q; ++a)
        for (Code b = 0; b < Q; ++b) {
          auto da = digits(a), db = digits(b);
          for (unsigned i = 0; i < n_; ++i) da[i] = (da[i] + db[i]) % p_;
          add_table_[a * Q + b] = from_digits(da);
        }
    }
    // Find a primitive element by brute force.
    log_.assign(Q, 0);
    exp_.assign(2 * Q, 0);
    for (Code g = 2; g < Q || Q == 2; ++g) {
      Code cand = (Q == 2) ? 1 : g;
      const auto gp = to_poly(cand);
      detail::PrimePoly cur{1};
      std::vector<Code> seq;
      seq.reserve(Q - 1);
      bool ok = true;
      for (unsigned long i = 0; i < Q - 1; ++i) {
        Code c = from_poly(cur);
        if (i > 0 && c == 1) {
          ok = false;
          break;
        }
        seq.push_back(c);
        cur = detail::mulmod_prime_poly(cur, gp, modulus_, p_);
      }
      if (!ok) continue;
      for (unsigned long i = 0; i < Q - 1; ++i) {
        exp_[i] = seq[i];
        exp_[i + Q - 1] = seq[i];
        log_[seq[i]] = static_cast<Code>(i);
      }
      break;
    }
    frob_p_table_.resize(Q);
    for (Code a = 0; a < Q; ++a) frob_p_table_[a] = pow(a, p_);
  }

  unsigned p_, m_, d_, n_;
  unsigned long q_, order_;
  std::vector<unsigned> modulus_;
  std::vector<Code> add_table_, neg_table_, log_, exp_, frob_p_table_;
};

using FieldPtr = std::shared_ptr<const GaloisField>;

/// An element of F_{q^d}.  Fields are interned for the life of the process, so
/// holding a raw pointer is safe.
class FieldElem {
 public:
  using Code = GaloisField::Code;

  FieldElem() = default;
  FieldElem(const GaloisField* f, Code c) : f_(f), c_(c) {}

  static FieldElem from_int(const GaloisField& f, long long v) { return {&f, f.from_int(v)}; }

  const GaloisField* field() const { return f_; }
  Code code() const { return c_; }

  FieldElem zero() const { return {f_, 0}; }
  FieldElem one() const { return {f_, 1}; }
  bool is_zero() const { return c_ == 0; }
  bool is_one() const { return c_ == 1; }

  FieldElem operator+(const FieldElem& o) const { return {f_, f_->add(c_, o.c_)}; }
  FieldElem operator-(const FieldElem& o) const { return {f_, f_->sub(c_, o.c_)}; }
  FieldElem operator-() const { return {f_, f_->neg(c_)}; }
  FieldElem operator*(const FieldElem& o) const { return {f_, f_->mul(c_, o.c_)}; }
  FieldElem operator/(const FieldElem& o) const { return {f_, f_->div(c_, o.c_)}; }
  FieldElem& operator+=(const FieldElem& o) { return *this = *this + o; }
  FieldElem& operator-=(const FieldElem& o) { return *this = *this - o; }
  FieldElem& operator*=(const FieldElem& o) { return *this = *this * o; }
  FieldElem inverse() const { return {f_, f_->inv(c_)}; }
  FieldElem pow(long long e) const { return {f_, f_->pow(c_, e)}; }
  FieldElem frobenius_q(unsigned k = 1) const { return {f_, f_->frobenius_q(c_, k)}; }
  FieldElem frobenius_p(unsigned k = 1) const { return {f_, f_->frobenius_p(c_, k)}; }

  bool operator==(const FieldElem& o) const { return c_ == o.c_; }
  bool operator!=(const FieldElem& o) const { return c_ != o.c_; }

  std::string to_string() const {
    if (f_->degree() == 1) return std::to_string(c_);
    std::string s = "[";
    auto dg = f_->digits(c_);
    for (std::size_t i = 0; i < dg.size(); ++i) s += (i ? "," : "") + std::to_string(dg[i]);
    return s + "]";
  }

 private:
  const GaloisField* f_ = nullptr;
  Code c_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const FieldElem& a) { return os << a.to_string(); }

}  // namespace mahlerlog
