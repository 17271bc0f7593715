#pragma once

#include "mahlerlog/ffcore/linalg.hpp"
#include "mahlerlog/mahler.hpp"
#include "mahlerlog/report.hpp"
#include "mahlerlog/series/evaluate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mahlerlog {

/// Auxiliary polynomial R_N(z, X_1..X_s) = sum_m sum_{j<=N} coeffs[m][j] z^j X^{monomials[m]}
/// with E_N = R_N(z, f(z)) vanishing to order n_N at z = 0.
struct AuxPoly {
  unsigned N = 0;
  unsigned s = 0;
  std::vector<std::vector<unsigned>> monomials;  // graded-lex, total degree <= N
  std::vector<std::vector<RatFunc>> coeffs;      // coeffs[m][j] is the coefficient of z^j X^{monomials[m]}
  long n_N = 0;
  long required_order = 0;
  std::size_t unknowns = 0;
  std::size_t equations = 0;
  std::size_t nullity = 0;
  std::size_t basis_index = 0;  // which nullspace basis vector was taken

  json summary() const {
    json terms = json::array();
    for (std::size_t m = 0; m < monomials.size(); ++m)
      for (std::size_t j = 0; j < coeffs[m].size(); ++j)
        if (!coeffs[m][j].is_zero())
          terms.push_back({{"z", j}, {"X", monomials[m]}, {"coeff", coeffs[m][j].to_string()}});
    return {{"N", N},           {"s", s},           {"unknowns", unknowns},       {"equations", equations},
            {"n_N", n_N},       {"required_order", required_order}, {"nullity", nullity},
            {"basis_index", basis_index}, {"terms", terms}};
  }
};

namespace detail {

inline unsigned long factorial(unsigned s) {
  unsigned long r = 1;
  for (unsigned i = 2; i <= s; ++i) r *= i;
  return r;
}

/// ceil(N^{s+1} / s!)
inline long vanishing_target(unsigned N, unsigned s) {
  const unsigned long num = ipow(N, s + 1);
  const unsigned long den = factorial(s);
  return static_cast<long>((num + den - 1) / den);
}

inline void exponents_of_degree(unsigned s, unsigned deg, std::vector<unsigned>& cur,
                                std::vector<std::vector<unsigned>>& out) {
  if (cur.size() + 1 == s) {
    cur.push_back(deg);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (unsigned a = deg + 1; a-- > 0;) {
    cur.push_back(a);
    exponents_of_degree(s, deg - a, cur, out);
    cur.pop_back();
  }
}

/// Products f^a, each known modulo z^P.
inline std::vector<CSeries> power_products(const std::vector<CSeries>& fs,
                                           const std::vector<std::vector<unsigned>>& monomials, long P) {
  const RatFunc one = fs.front().one();
  std::vector<CSeries> out;
  for (const auto& a : monomials) {
    CSeries acc = CSeries::constant(one, fs.front().var()).truncated(P);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] > 0) acc = (acc * fs[i].truncated(P).pow(a[i], P)).truncated(P);
    out.push_back(acc);
  }
  return out;
}

inline long common_precision(const std::vector<CSeries>& fs) {
  long P = kExact;
  for (const auto& f : fs) P = std::min(P, f.prec());
  return P;
}

inline CSeries substitute(const AuxPoly& R, const std::vector<CSeries>& fpow, long P) {
  const RatFunc one = fpow.front().one();
  const char var = fpow.front().var();
  CSeries acc = CSeries::zero(one, var);
  for (std::size_t m = 0; m < R.monomials.size(); ++m) {
    CSeries poly(one, var, 0, kExact, R.coeffs[m]);
    acc = acc + (poly * fpow[m]).truncated(P);
  }
  return acc.truncated(P);
}

}  // namespace detail

/// Monomials X^a with |a| <= N: by total degree, then lexicographically decreasing.
inline std::vector<std::vector<unsigned>> graded_lex_monomials(unsigned s, unsigned N) {
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> cur;
  for (unsigned deg = 0; deg <= N; ++deg) detail::exponents_of_degree(s, deg, cur, out);
  return out;
}

/// E_N = R_N(z, f(z)) modulo z^prec (prec is capped by the precision of the fs).
inline CSeries E_N_series(const AuxPoly& R, const std::vector<CSeries>& fs, long prec = kExact) {
  require(fs.size() == R.s && !fs.empty(), ErrorKind::InvalidArgument, "number of series does not match R");
  const long P = std::min(prec, detail::common_precision(fs));
  return detail::substitute(R, detail::power_products(fs, R.monomials, P), P);
}

/// Recomputes n_N by substitution and scales R so that the leading coefficient of E_N is 1.
inline void normalize_auxpoly(AuxPoly& R, const std::vector<CSeries>& fs) {
  const CSeries E = E_N_series(R, fs);
  const auto v = E.valuation();
  require(v.has_value(), ErrorKind::DegenerateInput, "E_N vanishes on the whole window");
  R.n_N = *v;
  const RatFunc inv = E.coeff(*v).inverse();
  for (auto& row : R.coeffs)
    for (auto& c : row) c = c * inv;
}

/// Nonzero R_N with deg_z <= N, deg_X <= N and ord E_N >= ceil(N^{s+1}/s!), from the nullspace
/// of the coefficient system over k.  Columns are (monomial, z^j) with monomials in graded-lex
/// order; nullspace basis vectors are tried from the last free column backwards.
inline AuxPoly construct_RN(const std::vector<CSeries>& fs, unsigned N) {
  require(!fs.empty(), ErrorKind::InvalidArgument, "at least one series is required");
  const unsigned s = static_cast<unsigned>(fs.size());
  require(N > detail::factorial(s), ErrorKind::InvalidArgument, "N must exceed s!");
  const long target = detail::vanishing_target(N, s);
  const long P = detail::common_precision(fs);
  require(P >= 2 * target, ErrorKind::PrecisionTooLow,
          "series precision " + std::to_string(P) + " is below 2*" + std::to_string(target));
  for (const auto& f : fs) require(f.ord() >= 0, ErrorKind::InvalidArgument, "inputs must be power series");
  require(std::any_of(fs.begin(), fs.end(), [P](const CSeries& f) { return !f.truncated(P).is_zero_on_window(); }),
          ErrorKind::DegenerateInput, "all series vanish on the window");

  AuxPoly R;
  R.N = N;
  R.s = s;
  R.required_order = target;
  R.monomials = graded_lex_monomials(s, N);
  const RatFunc zero = fs.front().one().zero();
  const RatFunc one = fs.front().one();
  const std::vector<CSeries> fpow = detail::power_products(fs, R.monomials, P);

  const std::size_t width = N + 1;
  R.unknowns = R.monomials.size() * width;
  R.equations = static_cast<std::size_t>(target);
  Matrix<RatFunc> sys(R.equations, R.unknowns, zero);
  for (long row = 0; row < target; ++row)
    for (std::size_t m = 0; m < R.monomials.size(); ++m)
      for (std::size_t j = 0; j < width && static_cast<long>(j) <= row; ++j)
        sys(static_cast<std::size_t>(row), m * width + j) = fpow[m].coeff(row - static_cast<long>(j));

  const auto basis = sys.nullspace(zero, one);
  R.nullity = basis.size();
  for (std::size_t b = basis.size(); b-- > 0;) {
    R.coeffs.assign(R.monomials.size(), std::vector<RatFunc>(width, zero));
    for (std::size_t m = 0; m < R.monomials.size(); ++m)
      for (std::size_t j = 0; j < width; ++j) R.coeffs[m][j] = basis[b][m * width + j];
    if (detail::substitute(R, fpow, P).is_zero_on_window()) continue;
    R.basis_index = b;
    normalize_auxpoly(R, fs);
    return R;
  }
  fail(ErrorKind::DegenerateInput, "every nullspace vector gives E_N = 0 on the window");
}

/// Guarantee on the coefficients of E_N from guarantees on the fs (same convention as TailBound).
inline TailBound tail_E_N(const AuxPoly& R, const std::vector<TailBound>& tails) {
  require(tails.size() == R.s, ErrorKind::InvalidArgument, "one tail bound per series");
  Rational off(0), slope(0), lc(0);
  unsigned long base = tails.front().log_base;
  for (const auto& t : tails) {
    off = std::min(off, t.offset);
    slope = std::max(slope, t.slope);
    lc = std::max(lc, t.log_coeff);
    base = std::min(base, t.log_base);
  }
  Rational cmin(0);
  for (const auto& row : R.coeffs)
    for (const auto& c : row)
      if (!c.is_zero()) cmin = std::min(cmin, *c.v_inf());
  const Rational n(static_cast<long long>(R.N));
  return {cmin + n * off, slope, n * lc, base};
}

// ---------------------------------------------------------------------------
// orbit forms and transported polynomials

inline bool is_exact_zero(const RatFunc& x) { return x.is_zero(); }
inline bool is_exact_zero(const LocalFieldElem& x) { return x.is_zero_on_window() && x.exact(); }
inline bool vanishes(const RatFunc& x) { return x.is_zero(); }
inline bool vanishes(const LocalFieldElem& x) { return x.is_zero_on_window(); }

/// U_t(X) = forms * X, n linear forms in X_1..X_n.
template <class T>
struct OrbitForms {
  unsigned t = 0;
  Matrix<T> forms;
  T det;  // det of the composite A(alpha^{d^{t-1}}) ... A(alpha)
};

/// U_0 = identity, U_k = A(alpha^{d^{k-1}}) U_{k-1}; A_eval(k) is A(alpha^{d^k}).
template <class T>
std::vector<OrbitForms<T>> orbit_forms(const std::function<Matrix<T>(unsigned)>& A_eval, unsigned t_max,
                                       const T& zero, const T& one) {
  std::vector<OrbitForms<T>> out;
  Matrix<T> A0 = A_eval(0);
  require(A0.rows() == A0.cols(), ErrorKind::InvalidArgument, "A must be square");
  out.push_back({0, Matrix<T>::identity(A0.rows(), zero, one), one});
  for (unsigned k = 1; k <= t_max; ++k) {
    Matrix<T> A = k == 1 ? A0 : A_eval(k - 1);
    require(A.rows() == A0.rows() && A.cols() == A0.cols(), ErrorKind::InvalidArgument, "A changes shape");
    std::vector<std::vector<T>> rows(A.rows(), std::vector<T>(A.cols(), zero));
    for (std::size_t i = 0; i < A.rows(); ++i)
      for (std::size_t j = 0; j < A.cols(); ++j) rows[i][j] = A(i, j);
    const T dA = detail::small_det(rows, zero);
    require(!vanishes(dA), ErrorKind::SingularOrbitMatrix,
            "A(alpha^{d^" + std::to_string(k - 1) + "}) is not invertible");
    out.push_back({k, A * out.back().forms, out.back().det * dA});
  }
  return out;
}

/// Polynomial in z, X_0..X_n; key = (z exponent, X_0 exponent, ..., X_n exponent).
template <class T>
struct MultiPoly {
  std::size_t n = 0;  // number of X variables besides X_0
  std::map<std::vector<long>, T> terms;

  void add(const std::vector<long>& key, const T& c) {
    auto it = terms.find(key);
    if (it == terms.end()) {
      if (!is_exact_zero(c)) terms.emplace(key, c);
      return;
    }
    it->second = it->second + c;
    if (is_exact_zero(it->second)) terms.erase(it);
  }

  /// Total degree in X_0..X_n if all terms agree, otherwise nullopt.
  std::optional<long> homogeneous_degree() const {
    std::optional<long> deg;
    for (const auto& [k, c] : terms) {
      long d = 0;
      for (std::size_t i = 1; i < k.size(); ++i) d += k[i];
      if (deg && *deg != d) return std::nullopt;
      deg = d;
    }
    return deg;
  }
};

/// R_{N,t}(z, X_0..X_n) = R_{N,0}(z^{D^t}, X_0, U_{t,1}(X), ..., U_{t,s}(X)), where R_{N,0} is the
/// homogenization of R_N with X_0 and D is the Mahler degree.  Coefficients of R are mapped into T by conv.
template <class T>
MultiPoly<T> build_RNt(const AuxPoly& R, const OrbitForms<T>& U, unsigned long D,
                       const std::function<T(const RatFunc&)>& conv) {
  const std::size_t n = U.forms.rows();
  require(R.s <= n, ErrorKind::InvalidArgument, "more series than functions in the system");
  const long zscale = static_cast<long>(ipow(D, U.t));
  MultiPoly<T> out;
  out.n = n;
  for (std::size_t m = 0; m < R.monomials.size(); ++m) {
    const auto& a = R.monomials[m];
    long deg = 0;
    for (unsigned x : a) deg += x;
    for (std::size_t j = 0; j < R.coeffs[m].size(); ++j) {
      if (R.coeffs[m][j].is_zero()) continue;
      MultiPoly<T> cur;
      std::vector<long> key(n + 2, 0);
      key[0] = static_cast<long>(j) * zscale;
      key[1] = static_cast<long>(R.N) - deg;
      cur.add(key, conv(R.coeffs[m][j]));
      for (std::size_t i = 0; i < a.size(); ++i)
        for (unsigned rep = 0; rep < a[i]; ++rep) {
          MultiPoly<T> next;
          for (const auto& [k, c] : cur.terms)
            for (std::size_t col = 0; col < n; ++col) {
              if (is_exact_zero(U.forms(i, col))) continue;
              std::vector<long> k2 = k;
              ++k2[col + 2];
              next.add(k2, c * U.forms(i, col));
            }
          cur = std::move(next);
        }
      for (const auto& [k, c] : cur.terms) out.add(k, c);
    }
  }
  return out;
}

/// Setting X_0 = 1: the polynomial in (z, X_1..X_n) as a map without the X_0 slot.
template <class T>
std::map<std::vector<long>, T> dehomogenize(const MultiPoly<T>& P) {
  std::map<std::vector<long>, T> out;
  for (const auto& [k, c] : P.terms) {
    std::vector<long> k2{k[0]};
    k2.insert(k2.end(), k.begin() + 2, k.end());
    auto it = out.find(k2);
    if (it == out.end())
      out.emplace(k2, c);
    else
      it->second = it->second + c;
  }
  return out;
}

/// P(z = alpha, X_0 = 1, X = xs) in the local field, truncated at cap.
inline LocalFieldElem evaluate_multipoly(const MultiPoly<LocalFieldElem>& P, const LocalFieldElem& alpha,
                                         const std::vector<LocalFieldElem>& xs, long cap) {
  require(xs.size() == P.n, ErrorKind::InvalidArgument, "wrong number of values");
  const GaloisField* F = alpha.field();
  const long e = alpha.e();
  LocalFieldElem acc = LocalFieldElem::zero(F, e);
  for (const auto& [k, c] : P.terms) {
    LocalFieldElem term = (c * alpha.pow(k[0], cap)).truncated(cap);
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (k[i + 2] > 0) term = (term * xs[i].pow(k[i + 2], cap)).truncated(cap);
    acc = acc + term;
  }
  return acc.truncated(cap);
}

/// The Mahler system of an instance with F = (G_0, G_1..G_n, 1) at alpha = u, D = q^d:
/// R_{N,t}(u, 1, F(u)) against E_N(u^{D^t}) for t = 0..t_max, with R_N built on the first s functions.
/// A_eval replaces the orbit matrices (negative controls).
inline std::vector<CheckRecord> RNt_identity_check(const Instance& inst, const AuxPoly& R, long prec_z,
                                                   unsigned t_max, long min_window = 0,
                                                   std::function<Matrix<LocalFieldElem>(unsigned)> A_eval = {}) {
  RatFuncEvaluator ev(inst.ctx.emb);
  const long cap = inst.ctx.cap();
  const std::size_t n = inst.n() + 2;
  require(R.s <= n, ErrorKind::InvalidArgument, "R has more variables than the system");
  std::vector<CSeries> all{G0_series(inst, prec_z)};
  std::vector<TailBound> tails{tail_G0(inst)};
  for (std::size_t i = 1; i <= inst.n(); ++i) {
    all.push_back(G_i_series(i, inst, prec_z));
    tails.push_back(tail_G_i(inst));
  }
  const LocalFieldElem u = inst.u();
  std::vector<LocalFieldElem> fu;
  for (std::size_t i = 0; i < all.size(); ++i) fu.push_back(evaluate_at_local(all[i], u, ev, tails[i]));
  fu.push_back(LocalFieldElem::one(inst.field(), inst.e()));

  std::vector<CSeries> fs(all.begin(), all.begin() + R.s);
  std::vector<TailBound> ts(tails.begin(), tails.begin() + R.s);
  const CSeries E = E_N_series(R, fs);
  const TailBound tE = tail_E_N(R, ts);

  const LocalFieldElem zero = LocalFieldElem::zero(inst.field(), inst.e());
  const LocalFieldElem one = LocalFieldElem::one(inst.field(), inst.e());
  if (!A_eval) A_eval = [&](unsigned k) { return system_at_orbit_point(inst, k, cap); };
  const auto forms = orbit_forms<LocalFieldElem>(A_eval, t_max, zero, one);
  const std::function<LocalFieldElem(const RatFunc&)> conv = [&](const RatFunc& c) { return ev.eval(c, cap); };
  const unsigned long D = ipow(inst.q(), inst.d());

  std::vector<CheckRecord> out;
  for (unsigned t = 0; t <= t_max; ++t) {
    const MultiPoly<LocalFieldElem> P = build_RNt(R, forms[t], D, conv);
    const LocalFieldElem lhs = evaluate_multipoly(P, u, fu, cap);
    const LocalFieldElem rhs = evaluate_at_local(E, u.frobenius_q(t * inst.d()), ev, tE);
    const auto deg = P.homogeneous_degree();
    CheckRecord r = agreement_record("auxpoly.RNt_identity_t" + std::to_string(t), lhs.compare(rhs), min_window,
                                     json{{"terms", P.terms.size()}, {"homogeneous_degree", deg ? *deg : -1}});
    if (!deg || *deg != static_cast<long>(R.N)) {
      r.status = Status::Failed;
      r.details["reason"] = "R_{N,t} is not homogeneous of degree N";
    }
    out.push_back(r);
  }
  return out;
}

/// v(E_N(alpha^{d^t})) for t = 0..t_max against n_N d^t v(alpha).  Rows whose window cannot
/// certify the valuation (small t, where the tail of E_N is not yet dominated) are reported as
/// uncertified; c0 is the least t0 such that every row t0 <= t <= t_max is certified and equal.
inline CheckRecord EN_valuation_scan(const AuxPoly& R, const std::vector<CSeries>& fs,
                                     const std::vector<TailBound>& tails, const LocalFieldElem& alpha,
                                     RatFuncEvaluator& ev, unsigned long d, unsigned t_max) {
  require(!alpha.is_zero_on_window() && alpha.ord_u() > 0, ErrorKind::NonpositiveValuation,
          "alpha must have positive valuation");
  require(d >= 2, ErrorKind::InvalidArgument, "Mahler degree must be at least 2");
  const CSeries E = E_N_series(R, fs);
  const TailBound tE = tail_E_N(R, tails);
  const long e = alpha.e();
  json rows = json::array();
  std::vector<bool> equal;
  for (unsigned t = 0; t <= t_max; ++t) {
    const long expected = R.n_N * static_cast<long>(ipow(d, t)) * alpha.ord_u();
    const LocalFieldElem x = alpha.pow(static_cast<long long>(ipow(d, t)), kExact);
    std::optional<LocalFieldElem> y;
    try {
      y = evaluate_at_local(E, x, ev, tE);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::PrecisionExhausted && err.kind() != ErrorKind::PoleAtPoint) throw;
    }
    const bool certified = y && !y->is_zero_on_window() && y->ord_u() < y->prec();
    require(certified || t < t_max, ErrorKind::PrecisionExhausted,
            "window cannot certify v(E_N(alpha^{d^t})) at t = " + std::to_string(t) + " (expected u-order " +
                std::to_string(expected) + ")");
    json row{{"t", t}, {"expected", to_string(Rational(expected, e))}, {"certified", certified}};
    if (certified) {
      row["v_inf"] = to_string(Rational(y->ord_u(), e));
      row["equal"] = y->ord_u() == expected;
    } else {
      row["window"] = y ? to_string(Rational(y->prec(), e)) : std::string("none");
      row["equal"] = false;
    }
    equal.push_back(certified && y->ord_u() == expected);
    rows.push_back(row);
  }
  std::optional<unsigned> t0;
  for (unsigned t = t_max + 1; t-- > 0 && equal[t];) t0 = t;
  json details{{"n_N", R.n_N}, {"d", d}, {"v_alpha", to_string(Rational(alpha.ord_u(), e))}, {"rows", rows}};
  if (t0) details["c0"] = *t0;
  return {"auxpoly.EN_valuation_scan", t0 ? Status::Evidence : Status::Failed, 0, details};
}

}  // namespace mahlerlog
