#pragma once

#include "mahlerlog/carlitz.hpp"

#include <vector>

namespace mahlerlog {

/// (sum c_n Z^n)^{q^k} for a series with F_{q^d} coefficients.
inline DigitSeries frobenius_twist(const DigitSeries& a, unsigned k) {
  if (k == 0) return a;
  const GaloisField* F = a.one().field();
  return a.map_coeffs([k](const FieldElem& c) { return c.frobenius_q(k); })
      .substitute_power(static_cast<long>(ipow(F->q(), k)));
}

/// sigma: constants x -> x^q, theta fixed, Z -> Z^q.
inline ZSeries sigma(const ZSeries& a) {
  const GaloisField* F = a.one().field();
  return a.map_coeffs([](const RatFunc& c) { return c.sigma_coeff(1); }).substitute_power(static_cast<long>(F->q()));
}

/// Coefficientwise theta-derivative.
inline ZSeries derivation_D(const ZSeries& a) {
  require(a.one().level() == 0, ErrorKind::UnsupportedRootLevel, "derivation requires level h = 0");
  return a.map_coeffs([](const RatFunc& c) { return c.deriv_theta(); });
}

struct ExpansionMap {
  DigitSeries l;                // l(u) = 1/theta
  std::vector<DigitSeries> li;  // l_i(u) = u_i / (theta tilde_theta)
};

/// Explicit local data: embedding, targets u_i, deformation parameters beta, s.
struct Instance {
  CarlitzContext ctx;
  std::vector<LocalFieldElem> targets;
  RatFunc beta;
  unsigned s = 1;
  long prec_z = 200;
  ExpansionMap exp;

  const GaloisField* field() const { return ctx.field(); }
  unsigned long q() const { return ctx.q(); }
  unsigned d() const { return ctx.field()->d(); }
  unsigned h() const { return ctx.h(); }
  long e() const { return ctx.emb.e; }
  std::size_t n() const { return targets.size(); }
  RatFunc theta() const { return RatFunc::theta(field(), h()); }
  RatFunc one() const { return RatFunc::one(field(), h()); }
  LocalFieldElem u() const { return LocalFieldElem::monomial(FieldElem(field(), 1), 1, e()); }
  ZSeries l_series() const { return to_ratfunc_series(exp.l, h()); }
  ZSeries li_series(std::size_t i) const { return to_ratfunc_series(exp.li.at(i - 1), h()); }
};

inline Instance make_instance(CarlitzContext ctx, std::vector<LocalFieldElem> targets, RatFunc beta, unsigned s,
                              long prec_z) {
  require(!beta.is_zero(), ErrorKind::InvalidArgument, "beta must be nonzero");
  require(beta.field() == ctx.field() && beta.level() == ctx.h(), ErrorKind::SpecMismatch,
          "beta must live over the instance field and level");
  require(beta.has_constant_field_coefficients(), ErrorKind::SigmaNotFixingBeta,
          "beta must have coefficients in F_q so that sigma fixes it");
  require(s >= 1, ErrorKind::InvalidArgument, "s must be positive");
  require(prec_z >= 2, ErrorKind::InvalidArgument, "Z-precision too small");
  Instance inst{std::move(ctx), std::move(targets), std::move(beta), s, prec_z, {}};
  const long q = static_cast<long>(inst.q());
  const long cap = inst.ctx.cap();
  inst.exp.l = uniformizer_expand(inst.ctx.theta_image().inverse(cap));
  LocalFieldElem tt_inv = inst.ctx.theta_tilde_theta().inverse(cap);
  for (const auto& ui : inst.targets) {
    require(!ui.is_zero_on_window(), ErrorKind::InvalidArgument, "target vanishes on its window");
    require(*ui.v_inf() > Rational(-q, q - 1), ErrorKind::NonpositiveValuation,
            "target outside the disk v > -q/(q-1)");
    inst.exp.li.push_back(uniformizer_expand(ui * tt_inv));
  }
  return inst;
}

/// Valuation data of the coefficients of the interpolation series.
inline Rational coeff_slope(const Instance& inst) { return Rational(1, inst.e() * static_cast<long>(inst.q())); }
inline Rational neg_part(const Rational& v) { return v < 0 ? -v : Rational(0); }

/// (1 - theta l^{q^i})^{s}, truncated modulo Z^prec.
inline ZSeries deformation_factor(const Instance& inst, unsigned i, long prec) {
  ZSeries lq = to_ratfunc_series(frobenius_twist(inst.exp.l, i), inst.h());
  ZSeries f = ZSeries::constant(inst.one(), 'Z') - lq.scaled(inst.theta());
  return f.pow(inst.s, prec).truncated(prec);
}

/// pi_k(Z, beta, s) = beta^{-k} prod_{i=1}^k (1 - theta l^{q^i})^s modulo Z^prec.
inline ZSeries pi_k_deformed(unsigned k, const Instance& inst, long prec) {
  ZSeries r = ZSeries::constant(inst.beta.pow(-static_cast<long long>(k)), 'Z');
  for (unsigned i = 1; i <= k; ++i) r = (r * deformation_factor(inst, i, prec)).truncated(prec);
  return r.truncated(prec);
}

/// 1/pi_k modulo Z^prec.
inline ZSeries inv_pi_k_deformed(unsigned k, const Instance& inst, long prec) {
  ZSeries r = ZSeries::constant(inst.beta.pow(static_cast<long long>(k)), 'Z');
  for (unsigned i = 1; i <= k; ++i) r = (r * deformation_factor(inst, i, prec).inverse(prec)).truncated(prec);
  return r.truncated(prec);
}

/// G_i = sum_k l_i^{q^k} / pi_k modulo Z^prec (terms with v_Z >= prec dropped).
inline ZSeries G_i_series(std::size_t i, const Instance& inst, long prec) {
  const DigitSeries& li = inst.exp.li.at(i - 1);
  ZSeries acc = ZSeries::zero(inst.one(), 'Z');
  ZSeries inv_pi = ZSeries::constant(inst.one(), 'Z');
  const long v0 = li.valuation().value_or(prec);
  for (unsigned k = 0;; ++k) {
    if (k > 0) {
      inv_pi = (inv_pi.scaled(inst.beta) * deformation_factor(inst, k, prec).inverse(prec)).truncated(prec);
    }
    const long vk = sat_mul(v0, static_cast<long>(ipow(inst.q(), k)));
    if (vk >= prec) break;
    acc = acc + (to_ratfunc_series(frobenius_twist(li, k), inst.h()) * inv_pi).truncated(prec);
  }
  return acc.truncated(prec);
}

/// G_0 = prod_{k>=1} (1 - theta l^{q^k})^{-s} modulo Z^prec.
inline ZSeries G0_series(const Instance& inst, long prec) {
  ZSeries acc = ZSeries::constant(inst.one(), 'Z').truncated(prec);
  const long v0 = inst.exp.l.valuation().value_or(prec);
  for (unsigned k = 1;; ++k) {
    if (sat_mul(v0, static_cast<long>(ipow(inst.q(), k))) >= prec) break;
    acc = (acc * deformation_factor(inst, k, prec).inverse(prec)).truncated(prec);
  }
  return acc;
}

/// M_i = sum_{k<d} l_i^{q^k} / pi_k modulo Z^prec.
inline ZSeries M_i_series(std::size_t i, const Instance& inst, long prec) {
  const DigitSeries& li = inst.exp.li.at(i - 1);
  ZSeries acc = ZSeries::zero(inst.one(), 'Z');
  for (unsigned k = 0; k < inst.d(); ++k)
    acc = acc + (to_ratfunc_series(frobenius_twist(li, k), inst.h()) * inv_pi_k_deformed(k, inst, prec)).truncated(prec);
  return acc.truncated(prec);
}

/// Tail bounds for the coefficient valuations of the series above: the
/// coefficient of Z^n has theta-degree at most n/(eq), and the power of beta
/// in front of l_i^{q^k} satisfies q^k <= n.
inline TailBound tail_G_i(const Instance& inst) {
  return {Rational(0), coeff_slope(inst), neg_part(*inst.beta.v_inf()), inst.q()};
}
inline TailBound tail_G0(const Instance& inst) { return {Rational(0), coeff_slope(inst), Rational(0), inst.q()}; }
inline TailBound tail_pi_k(const Instance& inst, unsigned k) {
  return {-Rational(static_cast<long long>(k)) * *inst.beta.v_inf() - Rational(0), coeff_slope(inst), Rational(0), inst.q()};
}
inline TailBound tail_inv_pi_k(const Instance& inst, unsigned k) {
  return {Rational(static_cast<long long>(k)) * *inst.beta.v_inf(), coeff_slope(inst), Rational(0), inst.q()};
}
/// M_i: terms k < d with beta^k in front.
inline TailBound tail_M_i(const Instance& inst) {
  Rational off(0);
  for (unsigned k = 0; k < inst.d(); ++k) off = std::min(off, Rational(static_cast<long long>(k)) * *inst.beta.v_inf());
  return {off, coeff_slope(inst), Rational(0), inst.q()};
}

/// sigma(G_0) = beta pi_1 G_0 (pi_1 G_0 when beta = 1) and
/// sigma(G_i) = pi_1 (G_i - l_i), with residuals required to vanish on at
/// least `min_window` coefficients.
inline std::vector<CheckRecord> sigma_action_check(const Instance& inst, long prec, long min_window = 0) {
  require(inst.beta.sigma_coeff(1) == inst.beta, ErrorKind::SigmaNotFixingBeta, "sigma does not fix beta");
  std::vector<CheckRecord> out;
  ZSeries pi1 = pi_k_deformed(1, inst, prec);
  ZSeries g0 = G0_series(inst, prec);
  out.push_back(agreement_record("interp.sigma_G0", sigma(g0).compare((pi1 * g0).scaled(inst.beta)), min_window));
  for (std::size_t i = 1; i <= inst.n(); ++i) {
    ZSeries gi = G_i_series(i, inst, prec);
    ZSeries rhs = pi1 * (gi - inst.li_series(i));
    out.push_back(agreement_record("interp.sigma_G" + std::to_string(i), sigma(gi).compare(rhs), min_window));
  }
  return out;
}

/// Lower bounds for v(l_i^{q^k}(z)/pi_k(z)) along z, compared with
/// k v(beta) + v(z) q^k; the measured values must also increase.
inline CheckRecord convergence_witness(const Instance& inst, std::size_t i, const LocalFieldElem& z, unsigned k_max) {
  RatFuncEvaluator ev(inst.ctx.emb);
  const Rational vz = *z.v_inf();
  const Rational vb = *inst.beta.v_inf();
  json rows = json::array();
  bool ok = true;
  Rational prev(-1000000);
  for (unsigned k = 0; k <= k_max; ++k) {
    const long qk = static_cast<long>(ipow(inst.q(), k));
    LocalFieldElem lz = evaluate_at_local(frobenius_twist(inst.exp.li.at(i - 1), k), z, inst.ctx.cap(),
                                          TailBound{Rational(0), Rational(0), Rational(0), 2});
    if (lz.is_zero_on_window()) {
      rows.push_back(json{{"k", k}, {"valuation", ">= " + to_string(Rational(lz.prec(), inst.e()))}});
      break;  // beyond the precision floor
    }
    LocalFieldElem pz = evaluate_at_local(pi_k_deformed(k, inst, inst.prec_z), z, ev, tail_pi_k(inst, k));
    Rational bound = Rational(static_cast<long long>(k)) * vb + vz * Rational(qk);
    Rational v = *lz.v_inf() - *pz.v_inf();
    const bool row_ok = v >= bound && (k == 0 || v > prev);
    ok = ok && row_ok;
    prev = v;
    rows.push_back(json{{"k", k}, {"valuation", to_string(v)}, {"bound", to_string(bound)}});
  }
  return {"interp.convergence_witness_" + std::to_string(i), ok ? Status::Evidence : Status::Failed, inst.ctx.cap(),
          json{{"v_z", to_string(vz)}, {"terms", rows}}};
}

}  // namespace mahlerlog
