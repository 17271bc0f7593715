#pragma once

#include "mahlerlog/report.hpp"
#include "mahlerlog/series/evaluate.hpp"

#include <vector>

namespace mahlerlog {

/// Series in z over F_{q^d}(theta) used for exp_C and Log_C.
using CSeries = Laurent<RatFunc>;

/// A local embedding together with a chosen (q-1)-th root of -theta.
struct CarlitzContext {
  LocalEmbedding emb;
  LocalFieldElem tilde_theta;

  const GaloisField* field() const { return emb.field; }
  unsigned long q() const { return emb.field->q(); }
  unsigned h() const { return emb.h; }
  long cap() const { return emb.cap; }
  LocalFieldElem theta_image() const { return emb.theta(); }
  LocalFieldElem theta_tilde_theta() const { return theta_image() * tilde_theta; }
};

inline CarlitzContext make_carlitz_context(LocalEmbedding emb, LocalFieldElem tilde_theta) {
  CarlitzContext ctx{std::move(emb), std::move(tilde_theta)};
  const auto q = static_cast<long long>(ctx.q());
  auto v = ctx.tilde_theta.v_inf();
  require(v && *v == Rational(-1, q - 1), ErrorKind::SpecMismatch, "tilde theta must have valuation -1/(q-1)");
  auto t = ctx.theta_image();
  require(t.v_inf() && *t.v_inf() == Rational(-1), ErrorKind::SpecMismatch, "theta image must have valuation -1");
  auto ag = ctx.tilde_theta.pow(q - 1, ctx.cap()).compare(-t);
  require(ag.equal, ErrorKind::SpecMismatch, "tilde theta^(q-1) differs from -theta at u^" + std::to_string(ag.first_diff));
  return ctx;
}

// theta^{q^i} - theta at level h
inline RatFunc carlitz_bracket(const GaloisField* F, unsigned i, unsigned h = 0) {
  RatFunc t = RatFunc::theta(F, h);
  return t.pow_p(F->m() * i) - t;
}

/// D_k = prod_{i=1}^k (theta^{q^i} - theta)^{q^{k-i}}
inline RatFunc carlitz_D(const GaloisField* F, unsigned k, unsigned h = 0) {
  RatFunc r = RatFunc::one(F, h);
  for (unsigned i = 1; i <= k; ++i) r *= carlitz_bracket(F, i, h).pow_p(F->m() * (k - i));
  return r;
}

/// L_k = prod_{i=1}^k (theta^{q^i} - theta)
inline RatFunc carlitz_L(const GaloisField* F, unsigned k, unsigned h = 0) {
  RatFunc r = RatFunc::one(F, h);
  for (unsigned i = 1; i <= k; ++i) r *= carlitz_bracket(F, i, h);
  return r;
}

/// pi_k = prod_{i=1}^k (1 - theta^{1-q^i})
inline RatFunc carlitz_pi_scalar(const GaloisField* F, unsigned k, unsigned h = 0) {
  RatFunc t = RatFunc::theta(F, h);
  RatFunc r = RatFunc::one(F, h);
  for (unsigned i = 1; i <= k; ++i) r *= r.one() - t * t.pow_p(F->m() * i).inverse();
  return r;
}

/// sum_{q^k < prec} z^{q^k} / D_k, known modulo z^prec.
inline CSeries carlitz_exp_series(const GaloisField* F, long prec, unsigned h = 0) {
  require(prec >= 1, ErrorKind::InvalidArgument, "precision must be positive");
  std::vector<RatFunc> cs(static_cast<std::size_t>(prec - 1), RatFunc::zero(F, h));
  const long q = static_cast<long>(F->q());
  unsigned k = 0;
  for (long n = 1; n < prec; n *= q, ++k) cs[static_cast<std::size_t>(n - 1)] = carlitz_D(F, k, h).inverse();
  return CSeries(RatFunc::one(F, h), 'z', 1, prec, std::move(cs));
}

/// sum_k (-1)^k z^{q^k} / L_k, known modulo z^prec.
inline CSeries carlitz_log_series(const GaloisField* F, long prec, unsigned h = 0) {
  require(prec >= 1, ErrorKind::InvalidArgument, "precision must be positive");
  std::vector<RatFunc> cs(static_cast<std::size_t>(prec - 1), RatFunc::zero(F, h));
  const long q = static_cast<long>(F->q());
  unsigned k = 0;
  for (long n = 1; n < prec; n *= q, ++k) {
    RatFunc c = carlitz_L(F, k, h).inverse();
    cs[static_cast<std::size_t>(n - 1)] = (k % 2) ? -c : c;
  }
  return CSeries(RatFunc::one(F, h), 'z', 1, prec, std::move(cs));
}

/// outer(inner(z)) for inner with positive order.
template <class C>
Laurent<C> compose(const Laurent<C>& outer, const Laurent<C>& inner) {
  auto v = inner.valuation();
  require(v && *v >= 1, ErrorKind::InvalidArgument, "inner series must have positive order");
  require(outer.ord() >= 0, ErrorKind::InvalidArgument, "outer series must be a power series");
  const long cut = outer.exact() ? kExact : sat_mul(outer.prec(), *v);
  const long cap = std::min(cut, inner.exact() ? kExact : cut);
  Laurent<C> acc = Laurent<C>::zero(outer.one(), inner.var());
  Laurent<C> pw = Laurent<C>::constant(outer.one(), inner.var());
  long cur = 0;
  for (std::size_t i : outer.nonzero_indices()) {
    const long n = outer.ord() + static_cast<long>(i);
    if (cut < kExact && n * *v >= cut) break;
    while (cur < n) {
      pw = (pw * inner).truncated(cap);
      ++cur;
    }
    acc = acc + pw.scaled(outer.stored()[i]);
  }
  return acc.truncated(cut);
}

/// a(c z)
inline CSeries scale_variable(const CSeries& a, const RatFunc& c) {
  std::vector<RatFunc> cs;
  cs.reserve(a.stored().size());
  RatFunc pw = c.pow(a.ord());
  for (const auto& x : a.stored()) {
    cs.push_back(x * pw);
    pw *= c;
  }
  return CSeries(a.one(), a.var(), a.ord(), a.prec(), std::move(cs));
}

inline CheckRecord verify_exp_functional(const GaloisField* F, long prec, unsigned h = 0) {
  require(static_cast<unsigned long>(prec) >= F->q() + 1, ErrorKind::InvalidArgument, "precision must exceed q");
  CSeries ex = carlitz_exp_series(F, prec, h);
  RatFunc t = RatFunc::theta(F, h);
  CSeries res = scale_variable(ex, t) - ex.scaled(t) - ex.pow(F->q(), prec);
  return identity_record("carlitz.exp_functional", res.is_zero_on_window(), res.prec(), res.ord(),
                         json{{"prec", prec}});
}

inline std::vector<CheckRecord> verify_exp_log_inverse(const GaloisField* F, long prec, unsigned h = 0) {
  require(prec >= 2, ErrorKind::InvalidArgument, "precision must be at least 2");
  CSeries ex = carlitz_exp_series(F, prec, h), lg = carlitz_log_series(F, prec, h);
  CSeries z = CSeries::monomial(RatFunc::one(F, h), 1, 'z');
  std::vector<CheckRecord> out;
  CSeries r1 = compose(ex, lg) - z;
  out.push_back(identity_record("carlitz.exp_of_log", r1.is_zero_on_window(), r1.prec(), r1.ord()));
  CSeries r2 = compose(lg, ex) - z;
  out.push_back(identity_record("carlitz.log_of_exp", r2.is_zero_on_window(), r2.prec(), r2.ord()));
  RatFunc t = RatFunc::theta(F, h);
  CSeries carlitz_t = z.scaled(t) + CSeries::monomial(RatFunc::one(F, h), static_cast<long>(F->q()), 'z');
  CSeries r3 = compose(lg, carlitz_t) - lg.scaled(t);
  out.push_back(identity_record("carlitz.log_theta_compat", r3.is_zero_on_window(), r3.prec(), r3.ord()));
  return out;
}

/// v_inf(L_k) against -(q^{k+1} - q)/(q - 1).
inline CheckRecord verify_L_valuation(const GaloisField* F, unsigned k_max, unsigned h = 0) {
  const long long q = static_cast<long long>(F->q());
  json rows = json::array();
  bool ok = true;
  for (unsigned k = 0; k <= k_max; ++k) {
    Rational got = *carlitz_L(F, k, h).v_inf();
    Rational want(q - static_cast<long long>(ipow(static_cast<unsigned long>(q), k + 1)), q - 1);
    ok = ok && got == want;
    rows.push_back(json{{"k", k}, {"v_inf", to_string(got)}, {"expected", to_string(want)}});
  }
  return {"carlitz.L_valuation", ok ? Status::Verified : Status::Failed, kExact, json{{"rows", rows}}};
}

/// pi_k = (-1)^k (theta tilde_theta)^{1-q^k} L_k, checked exactly in k(tilde_theta)
/// (where tilde_theta^{q^k-1} = (-theta)^{(q^k-1)/(q-1)}) and in the local field.
inline std::vector<CheckRecord> verify_pi_identity(const CarlitzContext& ctx, unsigned k_max) {
  const GaloisField* F = ctx.field();
  const unsigned h = ctx.h();
  const long long q = static_cast<long long>(ctx.q());
  RatFunc t = RatFunc::theta(F, h);
  bool exact_ok = true;
  for (unsigned k = 0; k <= k_max; ++k) {
    const long long qk = static_cast<long long>(ipow(static_cast<unsigned long>(q), k));
    RatFunc lhs = carlitz_pi_scalar(F, k, h) * t.pow(qk - 1) * (-t).pow((qk - 1) / (q - 1));
    RatFunc rhs = carlitz_L(F, k, h) * RatFunc::from_int(F, (k % 2) ? -1 : 1, h);
    exact_ok = exact_ok && lhs == rhs;
  }
  std::vector<CheckRecord> out;
  out.push_back({"carlitz.pi_identity_exact", exact_ok ? Status::Verified : Status::Failed, kExact,
                 json{{"k_max", k_max}}});

  RatFuncEvaluator ev(ctx.emb);
  const long cap = ctx.cap();
  LocalFieldElem tt = ctx.theta_tilde_theta();
  bool local_ok = true;
  long window = kExact;
  long first = 0;
  for (unsigned k = 0; k <= k_max; ++k) {
    LocalFieldElem lhs = ev.eval(carlitz_pi_scalar(F, k, h), cap);
    LocalFieldElem pw = tt * tt.frobenius_q(k).inverse(cap + 4 * std::abs(tt.ord_u()) * static_cast<long>(ipow(static_cast<unsigned long>(q), k)));
    LocalFieldElem rhs = (pw * ev.eval(carlitz_L(F, k, h), kExact)).truncated(cap);
    if (k % 2) rhs = -rhs;
    auto ag = lhs.compare(rhs);
    window = std::min(window, ag.window);
    if (!ag.equal) {
      local_ok = false;
      first = ag.first_diff;
    }
  }
  out.push_back(identity_record("carlitz.pi_identity_local", local_ok && window >= cap, window, first));
  return out;
}

struct TildePi {
  LocalFieldElem value;
  unsigned cutoff = 0;  // factors with index > cutoff are 1 modulo the precision
};

/// tilde_pi = theta tilde_theta prod_{k>=1} (1 - theta^{1-q^k})^{-1} modulo u^prec.
inline TildePi tilde_pi(const CarlitzContext& ctx, long prec) {
  const GaloisField* F = ctx.field();
  const long e = ctx.emb.e;
  LocalFieldElem lead = ctx.theta_tilde_theta();
  LocalFieldElem t = ctx.theta_image();
  const long rel = prec - lead.ord_u();
  require(rel > 0, ErrorKind::PrecisionExhausted, "precision below the order of tilde pi");
  LocalFieldElem prod = LocalFieldElem::one(F, e);
  unsigned k = 1;
  for (;; ++k) {
    // v(theta^{1-q^k}) = q^k - 1
    const long dev = e * (static_cast<long>(ipow(ctx.q(), k)) - 1);
    if (dev >= rel) break;
    LocalFieldElem x = t * t.frobenius_q(k).inverse(rel + 2 * e * static_cast<long>(ipow(ctx.q(), k)));
    LocalFieldElem factor = LocalFieldElem::one(F, e) - x.truncated(rel);
    prod = (prod * factor.inverse(rel)).truncated(rel);
  }
  return {(lead * prod).truncated(prec), k - 1};
}

/// Log_C(x) = sum (-1)^k x^{q^k}/L_k for v(x) > -q/(q-1), modulo u^cap.
inline LocalFieldElem carlitz_log_at(const CarlitzContext& ctx, const LocalFieldElem& x) {
  const long q = static_cast<long>(ctx.q());
  const long e = ctx.emb.e;
  const long cap = ctx.cap();
  require(!x.is_zero_on_window(), ErrorKind::InvalidArgument, "log of an element vanishing on its window");
  require(*x.v_inf() > Rational(-q, q - 1), ErrorKind::PrecisionExhausted, "outside the disk of convergence of Log_C");
  RatFuncEvaluator ev(ctx.emb);
  LocalFieldElem acc = LocalFieldElem::zero(ctx.field(), e);
  for (unsigned k = 0;; ++k) {
    const long qk = static_cast<long>(ipow(ctx.q(), k));
    const long ord = qk * x.ord_u() + e * (qk * q - q) / (q - 1);
    if (ord >= cap && k > 0) break;
    LocalFieldElem L = ev.eval(carlitz_L(ctx.field(), k, ctx.h()), kExact);
    LocalFieldElem term = x.frobenius_q(k) * L.inverse(cap - qk * x.ord_u() + 2 * std::abs(L.ord_u()) + 1);
    acc += (k % 2) ? -term.truncated(cap) : term.truncated(cap);
  }
  return acc.truncated(cap);
}

/// exp_C(x) = sum x^{q^k}/D_k modulo u^cap.
inline LocalFieldElem carlitz_exp_at(const CarlitzContext& ctx, const LocalFieldElem& x) {
  const long e = ctx.emb.e;
  const long cap = ctx.cap();
  RatFuncEvaluator ev(ctx.emb);
  LocalFieldElem acc = LocalFieldElem::zero(ctx.field(), e);
  if (x.is_zero_on_window()) return LocalFieldElem::zero(ctx.field(), e, x.prec());
  for (unsigned k = 0;; ++k) {
    const long qk = static_cast<long>(ipow(ctx.q(), k));
    const long ord = qk * (x.ord_u() + e * static_cast<long>(k));
    if (ord >= cap && x.ord_u() + e * static_cast<long>(k) > 0) break;
    require(k < 40, ErrorKind::PrecisionExhausted, "exp_C did not reach the precision floor");
    LocalFieldElem D = ev.eval(carlitz_D(ctx.field(), k, ctx.h()), kExact);
    LocalFieldElem term = x.frobenius_q(k) * D.inverse(cap - qk * x.ord_u() + 2 * std::abs(D.ord_u()) + 1);
    acc += term.truncated(cap);
  }
  return acc.truncated(cap);
}

/// Solves alpha^q + theta alpha = beta by digit-by-digit lifting.  The map is
/// additive, so each new digit only changes the residual by its own image.
inline LocalFieldElem solve_carlitz_step(const CarlitzContext& ctx, const LocalFieldElem& beta) {
  const GaloisField* F = ctx.field();
  const long q = static_cast<long>(ctx.q());
  const long e = ctx.emb.e;
  LocalFieldElem T = ctx.theta_image();
  const long tord = T.ord_u();
  const FieldElem tlead = T.series().leading();
  const long P = beta.exact() ? ctx.cap() : beta.prec();
  const long alpha_prec = P - tord;
  LocalFieldElem r = beta.truncated(P);
  LocalFieldElem alpha = LocalFieldElem::zero(F, e);
  for (int guard = 0; !r.is_zero_on_window(); ++guard) {
    require(guard < 100000, ErrorKind::PrecisionExhausted, "digit lifting did not terminate");
    const long t = r.ord_u();
    const FieldElem rt = r.series().leading();
    long j;
    FieldElem c;
    const long lhs = t * (q - 1), bal = q * tord;
    if (lhs < bal) {
      if (t % q != 0) fail(ErrorKind::NoRootInField, "leading u-order " + std::to_string(t) + "/" + std::to_string(q) + " is not integral");
      j = t / q;
      c = rt.frobenius_q(F->d() - 1);  // c^q = rt
    } else if (lhs > bal) {
      j = t - tord;
      c = rt / tlead;
    } else {
      if (tord % (q - 1) != 0) fail(ErrorKind::NoRootInField, "balanced u-order is not integral");
      j = tord / (q - 1);
      bool found = false;
      for (GaloisField::Code code = 0; code < F->order(); ++code) {
        FieldElem cand(F, code);
        if (cand.frobenius_q() + tlead * cand == rt) {
          c = cand;
          found = true;
          break;
        }
      }
      if (!found) fail(ErrorKind::NoRootInField, "residue equation c^q + lead(theta) c = r has no root in the residue field");
    }
    LocalFieldElem digit = LocalFieldElem::monomial(c, j, e);
    alpha += digit;
    r = (r - digit.frobenius_q(1) - T * digit).truncated(P);
  }
  return alpha.truncated(alpha_prec);
}

struct ReductionResult {
  std::vector<LocalFieldElem> chain;  // chain[0] = beta, chain[j+1]^q + theta chain[j+1] = chain[j]
  int n = 0;
  const LocalFieldElem& alpha() const { return chain.back(); }
};

/// Repeats beta -> alpha (alpha^q + theta alpha = beta) until v(alpha) > -q/(q-1).
inline ReductionResult reduce_to_convergence_domain(const LocalFieldElem& beta, const CarlitzContext& ctx,
                                                    int max_steps = 64) {
  const long long q = static_cast<long long>(ctx.q());
  const Rational bound(-q, q - 1);
  require(!beta.is_zero_on_window(), ErrorKind::NotNeeded, "beta vanishes on its window");
  require(*beta.v_inf() <= bound, ErrorKind::NotNeeded, "beta already lies in the disk v > -q/(q-1)");
  ReductionResult res;
  res.chain.push_back(beta);
  while (!res.chain.back().is_zero_on_window() && *res.chain.back().v_inf() <= bound) {
    require(res.n < max_steps, ErrorKind::PrecisionExhausted, "too many reduction steps");
    res.chain.push_back(solve_carlitz_step(ctx, res.chain.back()));
    ++res.n;
  }
  return res;
}

/// Residual and valuation law for each step of a reduction.
inline CheckRecord verify_reduction(const CarlitzContext& ctx, const ReductionResult& res) {
  LocalFieldElem T = ctx.theta_image();
  const long long q = static_cast<long long>(ctx.q());
  bool ok = true;
  long window = kExact;
  json steps = json::array();
  for (std::size_t i = 0; i + 1 < res.chain.size(); ++i) {
    const auto& b = res.chain[i];
    const auto& a = res.chain[i + 1];
    auto ag = (a.frobenius_q(1) + T * a).compare(b);
    const bool law = *a.v_inf() == *b.v_inf() / Rational(q);
    ok = ok && ag.equal && law;
    window = std::min(window, ag.window);
    steps.push_back(json{{"v_beta", to_string(*b.v_inf())}, {"v_alpha", to_string(*a.v_inf())},
                         {"residual_zero", ag.equal}, {"window", window_json(ag.window)}});
  }
  return {"carlitz.reduction", ok ? Status::Verified : Status::Failed, window, json{{"n", res.n}, {"steps", steps}}};
}

}  // namespace mahlerlog
