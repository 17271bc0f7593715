#include "mahlerlog/carlitz.hpp"

#include <gtest/gtest.h>

using namespace mahlerlog;

namespace {

// theta = -u^{-2}, tilde_theta = u^{-1}, over F_{3^d}
CarlitzContext canonical(unsigned d = 1, long cap = 400) {
  auto f = GaloisField::make(3, 1, d);
  const GaloisField* F = f.get();
  LocalEmbedding emb;
  emb.field = F;
  emb.e = 2;
  emb.h = 0;
  emb.vartheta = LocalFieldElem::monomial(FieldElem::from_int(*F, -1), -2, 2);
  emb.cap = cap;
  return make_carlitz_context(emb, LocalFieldElem::monomial(FieldElem(F, 1), -1, 2));
}

RatFunc T(const GaloisField* F) { return RatFunc::theta(F); }
RatFunc one(const GaloisField* F) { return RatFunc::one(F); }

// F_q-linear composition through the Frobenius: a(b) = sum_k a_{q^k} b^{(q^k)}
CSeries compose_linear(const CSeries& a, const CSeries& b, long prec) {
  const GaloisField* F = a.one().field();
  const long q = static_cast<long>(F->q());
  CSeries acc = CSeries::zero(a.one(), 'z');
  unsigned k = 0;
  for (long n = 1; n < prec; n *= q, ++k) {
    RatFunc c = a.coeff(n);
    if (c.is_zero()) continue;
    CSeries tw = b.map_coeffs([&](const RatFunc& x) { return x.pow_p(F->m() * k); }).substitute_power(n);
    acc = acc + tw.scaled(c);
  }
  return acc.truncated(prec);
}

}  // namespace

TEST(Carlitz, DkLkPiK) {
  auto f = GaloisField::make(3, 1, 1);
  const GaloisField* F = f.get();
  RatFunc t = T(F);
  EXPECT_TRUE(carlitz_D(F, 0).is_one());
  EXPECT_EQ(carlitz_D(F, 1), t.pow(3) - t);
  EXPECT_EQ(carlitz_D(F, 2), (t.pow(9) - t) * (t.pow(3) - t).pow(3));
  EXPECT_TRUE(carlitz_L(F, 0).is_one());
  EXPECT_EQ(carlitz_L(F, 1), t.pow(3) - t);
  EXPECT_EQ(*carlitz_L(F, 1).v_inf(), Rational(-3));
  EXPECT_EQ(*carlitz_L(F, 2).v_inf(), Rational(-12));
  EXPECT_TRUE(carlitz_pi_scalar(F, 0).is_one());
  EXPECT_EQ(carlitz_pi_scalar(F, 1), one(F) - t.pow(-2));
  EXPECT_EQ(carlitz_pi_scalar(F, 2), (one(F) - t.pow(-2)) * (one(F) - t.pow(-8)));
  for (unsigned p : {2u, 3u, 5u}) {
    auto g = GaloisField::make(p, 1, 1);
    auto rec = verify_L_valuation(g.get(), 6);
    EXPECT_EQ(rec.status, Status::Verified) << rec.to_json().dump();
  }
  auto f9 = GaloisField::make(3, 2, 1);  // q = 9
  EXPECT_EQ(verify_L_valuation(f9.get(), 4).status, Status::Verified);
  EXPECT_EQ(*carlitz_L(f9.get(), 2).v_inf(), Rational(-(729 - 9), 8));
}

TEST(Carlitz, ExpLogSeries) {
  auto f = GaloisField::make(3, 1, 1);
  const GaloisField* F = f.get();
  RatFunc t = T(F);
  CSeries e4 = carlitz_exp_series(F, 4);
  EXPECT_EQ(e4.prec(), 4);
  EXPECT_TRUE(e4.coeff(1).is_one());
  EXPECT_EQ(e4.coeff(3), (t.pow(3) - t).inverse());
  EXPECT_EQ(e4.nonzero_count(), 2u);
  CSeries e2 = carlitz_exp_series(F, 2);
  EXPECT_EQ(e2.nonzero_count(), 1u);
  CSeries e10 = carlitz_exp_series(F, 10);
  EXPECT_EQ(e10.coeff(9), ((t.pow(9) - t) * (t.pow(3) - t).pow(3)).inverse());
  CSeries l4 = carlitz_log_series(F, 4);
  EXPECT_EQ(l4.coeff(3), -(t.pow(3) - t).inverse());
  CSeries l10 = carlitz_log_series(F, 10);
  EXPECT_EQ(l10.coeff(9), ((t.pow(9) - t) * (t.pow(3) - t)).inverse());
  EXPECT_EQ(carlitz_log_series(F, 2).nonzero_count(), 1u);
}

TEST(Carlitz, ExpFunctionalEquation) {
  auto f = GaloisField::make(3, 1, 1);
  const GaloisField* F = f.get();
  // coefficient of z^q by hand: theta^q/D_1 - theta/D_1 - 1 = 0
  RatFunc t = T(F);
  RatFunc d1 = carlitz_D(F, 1);
  EXPECT_TRUE((t.pow(3) / d1 - t / d1 - one(F)).is_zero());
  auto rec = verify_exp_functional(F, 30);
  EXPECT_EQ(rec.status, Status::Verified);
  EXPECT_EQ(rec.window, 30);
  for (auto [p, m] : {std::pair{2u, 1u}, {5u, 1u}, {2u, 2u}}) {
    auto g = GaloisField::make(p, m, 1);
    EXPECT_EQ(verify_exp_functional(g.get(), 70).status, Status::Verified);
  }
}

TEST(Carlitz, ExpLogInverse) {
  for (auto [p, m, prec] : {std::tuple{3u, 1u, 30L}, {3u, 1u, 100L}, {2u, 1u, 70L}, {5u, 1u, 130L}, {2u, 2u, 70L}}) {
    auto g = GaloisField::make(p, m, 1);
    const GaloisField* F = g.get();
    for (const auto& r : verify_exp_log_inverse(F, prec)) {
      EXPECT_EQ(r.status, Status::Verified) << r.id << " p=" << p << " m=" << m;
      EXPECT_EQ(r.window, prec);
    }
    // independent route: linear composition through the Frobenius
    CSeries ex = carlitz_exp_series(F, prec), lg = carlitz_log_series(F, prec);
    CSeries z = CSeries::monomial(one(F), 1, 'z');
    EXPECT_TRUE(compose_linear(ex, lg, prec).compare(z.truncated(prec)).equal);
    EXPECT_TRUE(compose_linear(lg, ex, prec).compare(z.truncated(prec)).equal);
    EXPECT_TRUE(compose(ex, lg).compare(compose_linear(ex, lg, prec)).equal);
  }
}

TEST(Carlitz, ContextValidation) {
  auto ctx = canonical();
  EXPECT_TRUE(ctx.tilde_theta.pow(2, 400).compare(-ctx.theta_image()).equal);
  EXPECT_EQ(*ctx.tilde_theta.v_inf(), Rational(-1, 2));
  EXPECT_THROW(make_carlitz_context(ctx.emb, LocalFieldElem::monomial(FieldElem::from_int(*ctx.field(), -1), -1, 2) *
                                                 LocalFieldElem::monomial(FieldElem(ctx.field(), 1), 0, 2) +
                                                 LocalFieldElem::monomial(FieldElem(ctx.field(), 1), 3, 2)),
               Error);
}

TEST(Carlitz, PiIdentity) {
  auto ctx = canonical();
  for (const auto& r : verify_pi_identity(ctx, 5)) EXPECT_EQ(r.status, Status::Verified) << r.to_json().dump();
}

TEST(Carlitz, TildePi) {
  auto ctx = canonical();
  TildePi p200 = tilde_pi(ctx, 200);
  TildePi p100 = tilde_pi(ctx, 100);
  EXPECT_EQ(*p200.value.v_inf(), Rational(-3, 2));
  EXPECT_EQ(p200.value.prec(), 200);
  auto ag = p100.value.compare(p200.value);
  EXPECT_TRUE(ag.equal);
  EXPECT_EQ(ag.window, 100);
  EXPECT_EQ(p200.value.series().leading(), ctx.theta_tilde_theta().series().leading());
  EXPECT_GE(p200.cutoff, 4u);
  // kernel of exp_C: the valuation of exp_C(truncated tilde pi) grows with the truncation
  Rational last(-1000);
  for (long P : {40L, 80L, 160L}) {
    LocalFieldElem tp = LocalFieldElem(tilde_pi(ctx, P).value.series().truncated(P), 2);
    LocalFieldElem exact_tp = LocalFieldElem::from_coeffs(ctx.field(), 2, tp.ord_u(), tp.series().stored());
    LocalFieldElem ev = carlitz_exp_at(ctx, exact_tp);
    Rational v = ev.is_zero_on_window() ? Rational(ev.prec(), 2) : *ev.v_inf();
    EXPECT_GE(v, Rational(P, 2) - Rational(3, 2));
    EXPECT_GT(v, last);
    last = v;
  }
}

TEST(Carlitz, LogAndExpAtLocalPoints) {
  auto ctx = canonical(1, 300);
  // exp_C(Log_C(x)) = x for x in the disk
  LocalFieldElem x = LocalFieldElem::monomial(FieldElem(ctx.field(), 1), -2, 2) * ctx.theta_image().inverse(300) +
                     LocalFieldElem::monomial(FieldElem(ctx.field(), 1), 1, 2);
  LocalFieldElem lx = carlitz_log_at(ctx, x);
  LocalFieldElem back = carlitz_exp_at(ctx, lx);
  auto ag = back.compare(x);
  EXPECT_TRUE(ag.equal);
  EXPECT_GE(ag.window, 290);
  EXPECT_THROW(carlitz_log_at(ctx, LocalFieldElem::monomial(FieldElem(ctx.field(), 1), -3, 2)), Error);
}

TEST(Carlitz, ReductionExamples) {
  // beta = -u^{-3} over F_27: residue equation w^3 - w + 1 = 0
  auto ctx27 = canonical(3);
  const GaloisField* F = ctx27.field();
  LocalFieldElem beta = LocalFieldElem::monomial(FieldElem::from_int(*F, -1), -3, 2);
  auto res = reduce_to_convergence_domain(beta, ctx27);
  EXPECT_EQ(res.n, 1);
  EXPECT_EQ(*res.alpha().v_inf(), Rational(-1, 2));
  EXPECT_EQ(verify_reduction(ctx27, res).status, Status::Verified);
  // Newton oracle: f'(alpha) = theta in characteristic 3, start from a brute-force residue root
  FieldElem w;
  for (GaloisField::Code c = 0; c < F->order(); ++c) {
    FieldElem x(F, c);
    if ((x * x * x - x + x.one()).is_zero()) {
      w = x;
      break;
    }
  }
  LocalFieldElem a = LocalFieldElem::monomial(w, -1, 2);
  LocalFieldElem th = ctx27.theta_image();
  for (int it = 0; it < 12; ++it) {
    LocalFieldElem fa = a.frobenius_q(1) + th * a - beta;
    if (fa.is_zero_on_window()) break;
    a = (a - fa * th.inverse(400)).truncated(402);
  }
  EXPECT_TRUE((a.frobenius_q(1) + th * a).compare(beta).equal);
  // both roots differ by an element of the kernel F_3 * tilde_theta
  LocalFieldElem diff = a - res.alpha();
  EXPECT_TRUE(diff.is_zero_on_window() || (diff.frobenius_q(1) + th * diff).is_zero_on_window());

  auto ctx3 = canonical(1);
  const GaloisField* F3 = ctx3.field();
  try {
    reduce_to_convergence_domain(LocalFieldElem::monomial(FieldElem::from_int(*F3, -1), -3, 2), ctx3);
    ADD_FAILURE() << "no root expected over F_3";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoRootInField);
  }
  try {
    reduce_to_convergence_domain(ctx3.theta_image(), ctx3);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotNeeded);
  }
  try {
    reduce_to_convergence_domain(LocalFieldElem::monomial(FieldElem(F3, 1), -4, 2), ctx3);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoRootInField);
  }
}

TEST(Carlitz, ReductionTwoSteps) {
  // over F_9: alpha2 = g u^{-1}, alpha1 = alpha2^3 + theta alpha2, beta = alpha1^3 + theta alpha1
  auto ctx = canonical(2);
  const GaloisField* F = ctx.field();
  FieldElem g(F, F->generator());
  LocalFieldElem th = ctx.theta_image();
  LocalFieldElem a2 = LocalFieldElem::monomial(g, -1, 2);
  LocalFieldElem a1 = a2.frobenius_q(1) + th * a2;
  LocalFieldElem beta = a1.frobenius_q(1) + th * a1;
  auto res = reduce_to_convergence_domain(beta, ctx);
  EXPECT_EQ(res.n, 2);
  EXPECT_EQ(*res.chain[1].v_inf(), Rational(-3, 2));
  EXPECT_EQ(*res.alpha().v_inf(), Rational(-1, 2));
  EXPECT_EQ(verify_reduction(ctx, res).status, Status::Verified);
  // a non-exact input carries its precision through
  auto r2 = reduce_to_convergence_domain(beta.truncated(50) + LocalFieldElem::zero(F, 2, 50), ctx);
  EXPECT_EQ(r2.n, 2);
  EXPECT_EQ(verify_reduction(ctx, r2).status, Status::Verified);
}
