#pragma once

#include "mahlerlog/ffcore/ratfunc.hpp"
#include "mahlerlog/series/laurent.hpp"
#include "mahlerlog/series/local_field.hpp"

#include <optional>
#include <vector>

namespace mahlerlog {

using ZSeries = Laurent<RatFunc>;     // series in Z over F_{q^d}(vartheta)
using DigitSeries = Laurent<FieldElem>;  // series in Z over F_{q^d}

inline std::optional<long> v_Z(const ZSeries& a) { return a.valuation(); }
inline std::optional<long> v_Z(const DigitSeries& a) { return a.valuation(); }

/// Z -> Z^{q^r}
template <class C>
Laurent<C> substitute_q_power(const Laurent<C>& a, unsigned long q, unsigned r) {
  return a.substitute_power(static_cast<long>(ipow(q, r)));
}

/// Embedding of F_{q^d}(vartheta) into F_{q^d}((u)): vartheta is sent to a
/// fixed local element and theta = vartheta^{p^h} follows.
struct LocalEmbedding {
  const GaloisField* field = nullptr;
  long e = 1;
  unsigned h = 0;
  LocalFieldElem vartheta;
  long cap = 400;  // absolute u-precision of every evaluation

  LocalFieldElem theta() const { return vartheta.frobenius_p(h); }
};

/// Evaluates rational functions in vartheta at the embedding, caching the
/// powers of the vartheta image.  One evaluator per computation.
class RatFuncEvaluator {
 public:
  explicit RatFuncEvaluator(const LocalEmbedding& emb) : emb_(emb) {}

  const LocalEmbedding& embedding() const { return emb_; }

  LocalFieldElem eval_poly(const Poly& p, long work) {
    LocalFieldElem acc = LocalFieldElem::zero(emb_.field, emb_.e);
    const auto& cs = p.codes();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (cs[i] == 0) continue;
      acc += power(i, work) * FieldElem(emb_.field, cs[i]);
    }
    return acc.truncated(work);
  }

  /// a(vartheta image) known at least to u^target, or exactly.
  LocalFieldElem eval(const RatFunc& a, long target) {
    require(a.level() == emb_.h, ErrorKind::SpecMismatch, "coefficient level differs from the embedding level");
    if (a.is_polynomial()) return eval_poly(a.num(), target);
    long slack = 8;
    for (int attempt = 0; attempt < 12; ++attempt, slack *= 2) {
      const long work = target + slack;
      LocalFieldElem n = eval_poly(a.num(), work);
      LocalFieldElem dv = eval_poly(a.den(), work);
      if (dv.is_zero_on_window()) {
        if (dv.exact()) fail(ErrorKind::PoleAtPoint, "denominator vanishes at the evaluation point");
        continue;
      }
      LocalFieldElem r = n * dv.inverse(sat_add(work, 2 * std::abs(dv.ord_u())));
      if (r.prec() >= target) return r.truncated(target);
    }
    fail(ErrorKind::PoleAtPoint, "denominator indistinguishable from zero within precision");
  }

 private:
  const LocalFieldElem& power(std::size_t i, long) {
    if (pows_.empty()) pows_.push_back(LocalFieldElem::one(emb_.field, emb_.e));
    while (pows_.size() <= i) pows_.push_back(pows_.back() * emb_.vartheta);
    return pows_[i];
  }

  const LocalEmbedding& emb_;
  std::vector<LocalFieldElem> pows_;
};

/// Guarantee on the coefficients that were truncated away:
/// v_inf(a_j) >= offset - slope * j - log_coeff * ceil(log_q(j)) for j >= prec.
struct TailBound {
  Rational offset{0};
  Rational slope{0};
  Rational log_coeff{0};
  unsigned long log_base = 2;

  /// Lower bound for v_inf(a_j x^j) over all j >= P, given v(x) > slope.
  Rational tail_valuation(long P, const Rational& vx) const {
    const Rational a = vx - slope;
    require(a > 0, ErrorKind::PrecisionExhausted, "evaluation point outside the guaranteed disk");
    Rational b = offset + Rational(P) * a;
    if (log_coeff > 0) {
      // j a - c log_b(j) increases for j >= P once P a >= 2c
      require(Rational(P) * a >= Rational(2) * log_coeff, ErrorKind::PrecisionExhausted,
              "window too short for the logarithmic tail term");
      long lg = 0;
      for (unsigned long pw = 1; pw < static_cast<unsigned long>(P); pw *= log_base) ++lg;
      b -= log_coeff * Rational(lg + 1);
    }
    return b;
  }
};

namespace detail {

/// Lower bound for the u-order of a coefficient's image.
inline long coeff_u_order(const RatFunc& c, long e) { return static_cast<long>(floor(*c.v_inf() * Rational(e))); }
inline long coeff_u_order(const FieldElem&, long) { return 0; }

template <class Coeff, class EvalFn>
LocalFieldElem evaluate_series(const Laurent<Coeff>& a, const LocalFieldElem& x, const std::optional<TailBound>& tail,
                               long cap, const GaloisField* f, EvalFn&& eval_coeff) {
  const long e = x.e();
  require(!x.is_zero_on_window(), ErrorKind::NonpositiveValuation, "evaluation point vanishes on its window");
  const long ox = x.ord_u();
  require(ox > 0, ErrorKind::NonpositiveValuation, "evaluation point must have positive valuation");
  long target = cap;
  if (!a.exact()) {
    require(tail.has_value(), ErrorKind::PrecisionExhausted, "truncated series without a tail bound");
    const Rational bound = tail->tail_valuation(a.prec(), Rational(ox, e));
    target = std::min(target, static_cast<long>(ceil(bound * Rational(e))));
  }
  if (a.is_zero_on_window()) return LocalFieldElem::zero(f, e, target);

  const long lo = a.ord();
  const long hi = a.support_end();
  std::vector<std::pair<long, LocalFieldElem>> ys;
  long min_ord = 0;
  for (long j = lo; j < hi; ++j) {
    const Coeff c = a.coeff(j);
    if (c.is_zero()) continue;
    if (coeff_u_order(c, e) + j * ox >= target) continue;  // exact valuation already beyond the window
    LocalFieldElem y = eval_coeff(c, target - j * ox);
    if (y.is_zero_on_window()) continue;  // the term is O(u^target)
    min_ord = std::min(min_ord, y.ord_u());
    ys.emplace_back(j, std::move(y));
  }

  const long pcap = sat_add(target, -min_ord);
  LocalFieldElem acc = LocalFieldElem::zero(f, e);
  LocalFieldElem xp = lo >= 0 ? LocalFieldElem::one(f, e) : x.inverse(pcap).pow(-lo, pcap);
  long cur = std::min<long>(lo, 0);
  for (auto& [j, y] : ys) {
    while (cur < j) {
      xp = (xp * x).truncated(pcap);
      ++cur;
    }
    acc += (y * xp).truncated(target);
  }
  return acc.truncated(target);
}

}  // namespace detail

/// Substitutes Z = x and theta = its image, summing to the precision floor.
/// The returned u-precision accounts for the coefficient precision and for
/// the tail bound of the truncated part.
inline LocalFieldElem evaluate_at_local(const ZSeries& a, const LocalFieldElem& x, RatFuncEvaluator& ev,
                                        const std::optional<TailBound>& tail) {
  const auto& emb = ev.embedding();
  return detail::evaluate_series(a, x, tail, emb.cap, emb.field,
                                 [&ev](const RatFunc& c, long need) { return ev.eval(c, need); });
}

inline LocalFieldElem evaluate_at_local(const DigitSeries& a, const LocalFieldElem& x, long cap,
                                        const std::optional<TailBound>& tail) {
  const GaloisField* f = x.field();
  const long e = x.e();
  return detail::evaluate_series(a, x, tail, cap, f,
                                 [e](const FieldElem& c, long) { return LocalFieldElem::monomial(c, 0, e); });
}

/// Digit expansion: the series f over F_{q^d} with f(u) = x.  Exact when x is.
inline DigitSeries uniformizer_expand(const LocalFieldElem& x) {
  require(!x.is_zero_on_window() && x.ord_u() > 0, ErrorKind::NonpositiveValuation,
          "uniformizer expansion needs positive valuation");
  const auto& s = x.series();
  return DigitSeries(s.one(), 'Z', s.ord(), s.prec(), s.stored());
}

/// Views a digit series as a series with constant rational-function coefficients.
inline ZSeries to_ratfunc_series(const DigitSeries& a, unsigned h) {
  const GaloisField* f = a.one().field();
  std::vector<RatFunc> cs;
  cs.reserve(a.stored().size());
  for (const auto& c : a.stored()) cs.push_back(RatFunc::constant(c, h));
  return ZSeries(RatFunc::one(f, h), a.var(), a.ord(), a.prec(), std::move(cs));
}

}  // namespace mahlerlog
