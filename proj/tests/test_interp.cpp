#include "mahlerlog/presets.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mahlerlog;

namespace {

ZSeries mono(const Instance&, const RatFunc& c, long n) { return ZSeries::monomial(c, n, 'Z'); }

}  // namespace

TEST(Interp, Expansions) {
  Instance inst = canonical_instance(60, 200);
  const GaloisField* F = inst.field();
  // l(Z) = -Z^2, l_1(Z) = Z^5
  EXPECT_EQ(inst.exp.l.nonzero_count(), 1u);
  EXPECT_EQ(inst.exp.l.coeff(2), FieldElem::from_int(*F, -1));
  EXPECT_EQ(inst.exp.li[0].nonzero_count(), 1u);
  EXPECT_EQ(inst.exp.li[0].coeff(5), FieldElem(F, 1));
  EXPECT_GE(*inst.exp.l.valuation(), inst.e());
  EXPECT_GE(*inst.exp.li[0].valuation(), 1);
  // soundness: re-evaluation at u reproduces 1/theta and u_1/(theta tilde_theta)
  LocalFieldElem lu = evaluate_at_local(inst.exp.l, inst.u(), 200, TailBound{});
  EXPECT_TRUE(lu.compare(inst.ctx.theta_image().inverse(200)).equal);
  LocalFieldElem l1u = evaluate_at_local(inst.exp.li[0], inst.u(), 200, TailBound{});
  EXPECT_TRUE(l1u.compare(inst.targets[0] * inst.ctx.theta_tilde_theta().inverse(200)).equal);

  // non-monomial target over F_9: u_1 = g/theta + u (v = 1/2)
  Instance i9 = canonical_instance(60, 200, 2);
  EXPECT_EQ(i9.exp.li[0].coeff(5), FieldElem(i9.field(), i9.field()->generator()));
  CarlitzContext c = canonical_context(1, 200);
  LocalFieldElem t1 = c.theta_image().inverse(200) + LocalFieldElem::monomial(FieldElem(c.field(), 1), 1, 2);
  Instance ix = make_instance(c, {t1}, RatFunc::one(c.field()), 1, 60);
  LocalFieldElem back = evaluate_at_local(ix.exp.li[0], ix.u(), 200, TailBound{});
  EXPECT_TRUE(back.compare(t1 * c.theta_tilde_theta().inverse(200)).equal);
  EXPECT_EQ(ix.exp.li[0].nonzero_count(), 2u);
  // a target outside the disk is rejected
  EXPECT_THROW(make_instance(c, {LocalFieldElem::monomial(FieldElem(c.field(), 1), -3, 2)}, RatFunc::one(c.field()), 1, 60),
               Error);
  // beta must be fixed by sigma
  auto c9 = canonical_context(2, 200);
  EXPECT_THROW(make_instance(c9, {}, RatFunc::constant(FieldElem(c9.field(), c9.field()->generator())), 1, 60), Error);
}

TEST(Interp, PiDeformed) {
  Instance inst = canonical_instance(60, 200);
  RatFunc t = inst.theta();
  ZSeries p1 = pi_k_deformed(1, inst, 60);
  EXPECT_TRUE(p1.compare(ZSeries::constant(inst.one(), 'Z') + mono(inst, t, 6)).equal);
  EXPECT_EQ(*v_Z(p1), 0);
  EXPECT_TRUE(pi_k_deformed(0, inst, 60).compare(ZSeries::constant(inst.one(), 'Z')).equal);
  // pi_1 at u is the scalar pi_1 = 1 - theta^{-2}
  RatFuncEvaluator ev(inst.ctx.emb);
  LocalFieldElem p1u = evaluate_at_local(p1, inst.u(), ev, tail_pi_k(inst, 1));
  EXPECT_TRUE(p1u.compare(ev.eval(carlitz_pi_scalar(inst.field(), 1), 200)).equal);
  // beta = theta, s = 2: constant term beta^{-k}
  Instance ib = canonical_instance(60, 200, 1, 2, RatFunc::theta(inst.field()));
  ZSeries p2 = pi_k_deformed(2, ib, 60);
  EXPECT_EQ(p2.coeff(0), t.pow(-2));
  ZSeries oracle = ZSeries::constant(t.pow(-2), 'Z');
  for (long i = 1; i <= 2; ++i) {
    ZSeries f = ZSeries::constant(inst.one(), 'Z') + mono(inst, t, 2 * static_cast<long>(ipow(3, static_cast<unsigned>(i))));
    oracle = oracle * f * f;
  }
  EXPECT_TRUE(p2.compare(oracle.truncated(60)).equal);
}

TEST(Interp, G0AndGi) {
  Instance inst = canonical_instance(60, 200);
  RatFunc t = inst.theta();
  ZSeries g0 = G0_series(inst, 12);
  EXPECT_TRUE(g0.compare(ZSeries::constant(inst.one(), 'Z') - mono(inst, t, 6)).equal);
  EXPECT_EQ(g0.prec(), 12);
  EXPECT_TRUE(G0_series(inst, 6).compare(ZSeries::constant(inst.one(), 'Z')).equal);
  ZSeries g1 = G_i_series(1, inst, 60);
  EXPECT_EQ(*v_Z(g1), 5);
  EXPECT_TRUE(g1.coeff(5).is_one());
  EXPECT_TRUE(G_i_series(1, inst, 15).compare(mono(inst, inst.one(), 5)).equal);
  // oracle: explicit sum over k with independently built 1/pi_k
  ZSeries oracle = ZSeries::zero(inst.one(), 'Z');
  for (unsigned k = 0; ipow(3, k) * 5 < 60; ++k) {
    ZSeries pk = ZSeries::constant(inst.one(), 'Z');
    for (unsigned i = 1; i <= k; ++i)
      pk = pk * (ZSeries::constant(inst.one(), 'Z') + mono(inst, t, 2 * static_cast<long>(ipow(3, i))));
    oracle = oracle + mono(inst, inst.one(), 5 * static_cast<long>(ipow(3, k))) * pk.inverse(60);
  }
  EXPECT_TRUE(g1.compare(oracle.truncated(60)).equal);
  // v_Z(G_i) >= 1 and G_0 has constant term 1 on other instances
  for (const Instance& other : {canonical_instance(60, 200, 2), sextic_instance(60, 200)}) {
    EXPECT_GE(*v_Z(G_i_series(1, other, 60)), 1);
    EXPECT_TRUE(G0_series(other, 60).coeff(0).is_one());
  }
}

TEST(Interp, MiSeries) {
  Instance inst = canonical_instance(80, 200);
  ZSeries m1 = M_i_series(1, inst, 80);
  EXPECT_TRUE(m1.compare(inst.li_series(1).truncated(80)).equal);
  Instance i9 = canonical_instance(80, 200, 2);
  ZSeries m9 = M_i_series(1, i9, 80);
  ZSeries li = i9.li_series(1);
  ZSeries want = li + to_ratfunc_series(frobenius_twist(i9.exp.li[0], 1), 0) * pi_k_deformed(1, i9, 80).inverse(80);
  EXPECT_TRUE(m9.compare(want.truncated(80)).equal);
  ZSeries gap = G_i_series(1, i9, 80) - m9;
  EXPECT_GE(*v_Z(gap), 9 * *v_Z(li));
}

TEST(Interp, GValuesMatchCarlitz) {
  Instance inst = canonical_instance(470, 400);
  RatFuncEvaluator ev(inst.ctx.emb);
  LocalFieldElem tt = inst.ctx.theta_tilde_theta();
  LocalFieldElem g1u = evaluate_at_local(G_i_series(1, inst, 470), inst.u(), ev, tail_G_i(inst));
  LocalFieldElem log_u1 = carlitz_log_at(inst.ctx, inst.targets[0]);
  auto a1 = (tt * g1u).compare(log_u1);
  EXPECT_TRUE(a1.equal);
  EXPECT_GE(a1.window, 300);
  LocalFieldElem g0u = evaluate_at_local(G0_series(inst, 470), inst.u(), ev, tail_G0(inst));
  auto a0 = (tt * g0u).compare(tilde_pi(inst.ctx, 400).value);
  EXPECT_TRUE(a0.equal);
  EXPECT_GE(a0.window, 300);
}

TEST(Interp, SigmaAction) {
  for (const Instance& inst : {canonical_instance(60, 200), canonical_instance(60, 200, 2),
                               canonical_instance(60, 200, 1, 2, RatFunc::theta(GaloisField::make(3, 1, 1).get())),
                               sextic_instance(60, 200)}) {
    for (const auto& r : sigma_action_check(inst, 60, 60)) EXPECT_EQ(r.status, Status::Verified) << r.to_json().dump();
  }
  // the constant-term part by hand: sigma(G_0)(0) = 1 = pi_1(0) G_0(0) for beta = 1
  Instance inst = canonical_instance(60, 200);
  EXPECT_TRUE((pi_k_deformed(1, inst, 60) * G0_series(inst, 60)).coeff(0).is_one());
  // sigma(G_1) has no Z^5 term: the k = 0 term is cancelled by -pi_1 l_1
  EXPECT_TRUE(sigma(G_i_series(1, inst, 60)).coeff(5).is_zero());
}

TEST(Interp, Derivation) {
  Instance inst = canonical_instance(60, 200);
  RatFunc t = inst.theta();
  EXPECT_TRUE(derivation_D(mono(inst, t, 6)).compare(mono(inst, inst.one(), 6)).equal);
  EXPECT_TRUE(derivation_D(inst.l_series()).is_zero_on_window());
  std::mt19937_64 rng(5);
  for (int it = 0; it < 100; ++it) {
    std::vector<RatFunc> a, b;
    for (int i = 0; i < 15; ++i) {
      a.push_back(t.pow(static_cast<long long>(rng() % 4)) * RatFunc::from_int(inst.field(), static_cast<long long>(rng() % 3)) +
                  (t + inst.one()).pow(-static_cast<long long>(rng() % 2)));
      b.push_back(t.pow(static_cast<long long>(rng() % 5)) + RatFunc::from_int(inst.field(), static_cast<long long>(rng() % 3)));
    }
    ZSeries A(inst.one(), 'Z', 0, 15, a), B(inst.one(), 'Z', 0, 15, b);
    EXPECT_TRUE(derivation_D(A * B).compare(derivation_D(A) * B + A * derivation_D(B)).equal);
  }
  Instance sx = sextic_instance(30, 100);
  EXPECT_THROW(derivation_D(G0_series(sx, 30)), Error);
}

TEST(Interp, ConvergenceWitness) {
  Instance inst = canonical_instance(200, 400);
  for (unsigned j = 0; j <= 2; ++j) {
    LocalFieldElem z = inst.u().frobenius_q(j);
    auto r = convergence_witness(inst, 1, z, 4);
    EXPECT_EQ(r.status, Status::Evidence) << r.to_json().dump();
  }
  Instance ib = canonical_instance(200, 400, 1, 1, RatFunc::theta(inst.field()));
  EXPECT_EQ(convergence_witness(ib, 1, inst.u(), 4).status, Status::Evidence);
}
