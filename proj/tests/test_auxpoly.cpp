#include "mahlerlog/auxpoly.hpp"
#include "mahlerlog/presets.hpp"

#include <gtest/gtest.h>

using namespace mahlerlog;

namespace {

const GaloisField* F3() { return GaloisField::make(3, 1, 1).get(); }

// naive substitution: f^a by repeated schoolbook products, then the z^j shifts
std::vector<RatFunc> naive_E(const AuxPoly& R, const std::vector<CSeries>& fs, long P) {
  const RatFunc zero = RatFunc::zero(F3());
  const RatFunc one = RatFunc::one(F3());
  auto mul = [&](const std::vector<RatFunc>& a, const std::vector<RatFunc>& b) {
    std::vector<RatFunc> c(static_cast<std::size_t>(P), zero);
    for (long i = 0; i < P; ++i)
      for (long j = 0; i + j < P; ++j) c[i + j] += a[i] * b[j];
    return c;
  };
  std::vector<RatFunc> E(static_cast<std::size_t>(P), zero);
  for (std::size_t m = 0; m < R.monomials.size(); ++m) {
    std::vector<RatFunc> pw(static_cast<std::size_t>(P), zero);
    pw[0] = one;
    for (std::size_t i = 0; i < R.s; ++i) {
      std::vector<RatFunc> f(static_cast<std::size_t>(P), zero);
      for (long k = 0; k < P; ++k) f[k] = fs[i].coeff(k);
      for (unsigned r = 0; r < R.monomials[m][i]; ++r) pw = mul(pw, f);
    }
    for (std::size_t j = 0; j <= R.N; ++j)
      for (long k = 0; k + static_cast<long>(j) < P; ++k) E[k + j] += R.coeffs[m][j] * pw[k];
  }
  return E;
}

void expect_auxpoly_laws(const AuxPoly& R, const std::vector<CSeries>& fs) {
  const long P = fs.front().prec();
  EXPECT_GE(R.n_N, R.required_order);
  const std::vector<RatFunc> E = naive_E(R, fs, P);
  for (long k = 0; k < R.n_N; ++k) EXPECT_TRUE(E[k].is_zero()) << "k = " << k;
  EXPECT_TRUE(E[R.n_N].is_one());
  const CSeries En = E_N_series(R, fs);
  EXPECT_EQ(En.valuation(), std::optional<long>(R.n_N));
  for (long k = 0; k < P; ++k) EXPECT_EQ(En.coeff(k), E[k]);
  // degree bounds
  bool nonzero = false;
  for (std::size_t m = 0; m < R.monomials.size(); ++m) {
    unsigned deg = 0;
    for (unsigned a : R.monomials[m]) deg += a;
    EXPECT_LE(deg, R.N);
    EXPECT_EQ(R.coeffs[m].size(), R.N + 1);
    for (const auto& c : R.coeffs[m]) nonzero = nonzero || !c.is_zero();
  }
  EXPECT_TRUE(nonzero);
}

AuxPoly manual(unsigned N, unsigned s, const std::map<std::pair<std::vector<unsigned>, unsigned>, RatFunc>& terms) {
  AuxPoly R;
  R.N = N;
  R.s = s;
  R.monomials = graded_lex_monomials(s, N);
  R.coeffs.assign(R.monomials.size(), std::vector<RatFunc>(N + 1, RatFunc::zero(F3())));
  for (const auto& [key, c] : terms) {
    auto it = std::find(R.monomials.begin(), R.monomials.end(), key.first);
    R.coeffs[static_cast<std::size_t>(it - R.monomials.begin())][key.second] = c;
  }
  return R;
}

template <class F>
void expect_kind(F f, ErrorKind kind) {
  try {
    f();
    ADD_FAILURE() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(Auxpoly, MonomialOrderAndCounts) {
  auto ms = graded_lex_monomials(2, 2);
  std::vector<std::vector<unsigned>> want{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(ms, want);
  EXPECT_EQ(graded_lex_monomials(1, 3).size(), 4u);
  EXPECT_EQ(graded_lex_monomials(3, 4).size(), 35u);  // C(7, 4)
  EXPECT_EQ(detail::vanishing_target(2, 1), 4);
  EXPECT_EQ(detail::vanishing_target(3, 1), 9);
  EXPECT_EQ(detail::vanishing_target(3, 2), 14);
  EXPECT_EQ(detail::vanishing_target(7, 3), 401);  // 2401 / 6
}

TEST(Auxpoly, CarlitzLogNEquals2) {
  std::vector<CSeries> fs{carlitz_log_series(F3(), 12)};
  AuxPoly R = construct_RN(fs, 2);
  EXPECT_EQ(R.unknowns, 9u);
  EXPECT_EQ(R.equations, 4u);
  EXPECT_EQ(R.required_order, 4);
  EXPECT_GE(R.nullity, 5u);
  expect_auxpoly_laws(R, fs);
  // N = 3: 16 unknowns, 9 equations
  std::vector<CSeries> fs3{carlitz_log_series(F3(), 30)};
  AuxPoly R3 = construct_RN(fs3, 3);
  EXPECT_EQ(R3.unknowns, 16u);
  EXPECT_EQ(R3.equations, 9u);
  expect_auxpoly_laws(R3, fs3);
}

TEST(Auxpoly, IdentitySeries) {
  // f = z: E_N is a polynomial in z, and every R in the kernel is a multiple of (X - z) or has high order
  const CSeries z = CSeries::monomial(RatFunc::one(F3()), 1, 'z').truncated(10);
  std::vector<CSeries> fs{z};
  AuxPoly R = construct_RN(fs, 2);
  EXPECT_EQ(R.unknowns, 9u);
  EXPECT_EQ(R.equations, 4u);
  expect_auxpoly_laws(R, fs);
  EXPECT_LE(R.n_N, 4);  // R(z, z) has degree at most 4 unless zero
  // the polynomial X^2 - z X vanishes identically at X = z: rejected upstream
  AuxPoly bad = manual(2, 1, {{{{2}, 0}, RatFunc::one(F3())}, {{{1}, 1}, -RatFunc::one(F3())}});
  EXPECT_TRUE(E_N_series(bad, fs).is_zero_on_window());
  expect_kind([&] { normalize_auxpoly(bad, fs); }, ErrorKind::DegenerateInput);
}

TEST(Auxpoly, TwoSeries) {
  std::vector<CSeries> fs{carlitz_log_series(F3(), 28), carlitz_exp_series(F3(), 28)};
  AuxPoly R = construct_RN(fs, 3);
  EXPECT_EQ(R.unknowns, 40u);
  EXPECT_EQ(R.equations, 14u);
  expect_auxpoly_laws(R, fs);
}

TEST(Auxpoly, TruncationRejected) {
  // X - (z - z^3/L_1): the truncation of log_C as a polynomial gives E_N = 0 modulo z^9
  const RatFunc one = RatFunc::one(F3());
  const CSeries lg = carlitz_log_series(F3(), 9);
  AuxPoly R = manual(3, 1, {{{{1}, 0}, one}, {{{0}, 1}, -one}, {{{0}, 3}, -lg.coeff(3)}});
  EXPECT_TRUE(E_N_series(R, {lg}).is_zero_on_window());
  expect_kind([&] { normalize_auxpoly(R, {lg}); }, ErrorKind::DegenerateInput);
  // with more precision the z^9 term shows up
  AuxPoly R2 = R;
  normalize_auxpoly(R2, {carlitz_log_series(F3(), 12)});
  EXPECT_EQ(R2.n_N, 9);
}

TEST(Auxpoly, Preconditions) {
  const CSeries lg = carlitz_log_series(F3(), 40);
  expect_kind([&] { construct_RN({lg}, 1); }, ErrorKind::InvalidArgument);      // N <= 1!
  expect_kind([&] { construct_RN({lg, lg}, 2); }, ErrorKind::InvalidArgument);  // N <= 2!
  expect_kind([&] { construct_RN({carlitz_log_series(F3(), 7)}, 2); }, ErrorKind::PrecisionTooLow);
  expect_kind([&] { construct_RN({lg, carlitz_log_series(F3(), 27)}, 3); }, ErrorKind::PrecisionTooLow);
  const CSeries zero = CSeries::zero(RatFunc::one(F3()), 'z', 40);
  expect_kind([&] { construct_RN({zero}, 2); }, ErrorKind::DegenerateInput);
}

TEST(Auxpoly, OrbitFormsDiagonal) {
  const RatFunc t = RatFunc::theta(F3());
  const RatFunc one = t.one();
  const RatFunc zero = t.zero();
  std::function<Matrix<RatFunc>(unsigned)> A = [&](unsigned k) {
    Matrix<RatFunc> m(2, 2, zero);
    m(0, 0) = t.pow(k + 1);
    m(1, 1) = one + t.pow(k);
    return m;
  };
  auto forms = orbit_forms<RatFunc>(A, 3, zero, one);
  ASSERT_EQ(forms.size(), 4u);
  EXPECT_TRUE(forms[0].forms(0, 0).is_one() && forms[0].forms(1, 1).is_one() && forms[0].forms(0, 1).is_zero());
  EXPECT_EQ(forms[1].forms(0, 0), t);
  EXPECT_EQ(forms[1].forms(1, 1), one + one);
  EXPECT_TRUE(forms[1].forms(0, 1).is_zero() && forms[1].forms(1, 0).is_zero());
  RatFunc prod = one;
  for (unsigned k = 0; k < 3; ++k) prod = prod * A(k).det(zero, one);
  EXPECT_EQ(forms[3].det, prod);
  EXPECT_EQ(forms[3].forms.det(zero, one), prod);

  // a non-diagonal system: composite determinant is still the product
  std::function<Matrix<RatFunc>(unsigned)> B = [&](unsigned k) {
    Matrix<RatFunc> m(3, 3, zero);
    m(0, 0) = t.pow(k) + one;
    m(0, 2) = t;
    m(1, 1) = t.inverse();
    m(1, 2) = t.pow(2 * k);
    m(2, 2) = one;
    m(2, 0) = one + one;
    return m;
  };
  auto fb = orbit_forms<RatFunc>(B, 3, zero, one);
  RatFunc pb = one;
  for (unsigned k = 0; k < 3; ++k) pb = pb * B(k).det(zero, one);
  EXPECT_EQ(fb[3].forms.det(zero, one), pb);
  EXPECT_EQ(fb[3].det, pb);

  std::function<Matrix<RatFunc>(unsigned)> S = [&](unsigned k) {
    Matrix<RatFunc> m = A(k);
    if (k == 1) m(1, 1) = zero;
    return m;
  };
  expect_kind([&] { orbit_forms<RatFunc>(S, 3, zero, one); }, ErrorKind::SingularOrbitMatrix);
  EXPECT_NO_THROW(orbit_forms<RatFunc>(S, 1, zero, one));
}

TEST(Auxpoly, BuildRNtExact) {
  const RatFunc t = RatFunc::theta(F3());
  const RatFunc one = t.one();
  const RatFunc zero = t.zero();
  std::vector<CSeries> fs{carlitz_log_series(F3(), 28), carlitz_exp_series(F3(), 28)};
  AuxPoly R = construct_RN(fs, 3);
  std::function<Matrix<RatFunc>(unsigned)> A = [&](unsigned k) {
    Matrix<RatFunc> m(3, 3, zero);
    m(0, 0) = t.pow(k + 1);
    m(1, 1) = one + t;
    m(1, 2) = t.pow(k);
    m(2, 2) = one;
    return m;
  };
  auto forms = orbit_forms<RatFunc>(A, 3, zero, one);
  std::function<RatFunc(const RatFunc&)> id = [](const RatFunc& c) { return c; };
  // t = 0: homogenization, and X_0 = 1 recovers R_N
  MultiPoly<RatFunc> P0 = build_RNt(R, forms[0], 3, id);
  EXPECT_EQ(P0.homogeneous_degree(), std::optional<long>(3));
  auto deh = dehomogenize(P0);
  std::size_t nz = 0;
  for (std::size_t m = 0; m < R.monomials.size(); ++m)
    for (std::size_t j = 0; j <= R.N; ++j) {
      if (R.coeffs[m][j].is_zero()) continue;
      ++nz;
      std::vector<long> key{static_cast<long>(j), R.monomials[m][0], R.monomials[m][1], 0};
      ASSERT_TRUE(deh.count(key));
      EXPECT_EQ(deh.at(key), R.coeffs[m][j]);
    }
  EXPECT_EQ(deh.size(), nz);
  // t >= 1: homogeneous, z exponents scaled by D^t, and evaluation commutes with the forms
  for (unsigned tt = 1; tt <= 3; ++tt) {
    MultiPoly<RatFunc> P = build_RNt(R, forms[tt], 3, id);
    EXPECT_EQ(P.homogeneous_degree(), std::optional<long>(3));
    for (const auto& [k, c] : P.terms) EXPECT_EQ(k[0] % static_cast<long>(ipow(3, tt)), 0);
    // X = (1, theta, theta^2) at X_0 = 1: P(1, X) = R_N(1, U_t X)
    const std::vector<RatFunc> X{one, t, t.pow(2)};
    const std::vector<RatFunc> UX = forms[tt].forms.apply(X);
    RatFunc lhs = zero;
    for (const auto& [k, c] : P.terms) lhs += c * X[0].pow(k[2]) * X[1].pow(k[3]) * X[2].pow(k[4]);
    RatFunc rhs = zero;
    for (std::size_t m = 0; m < R.monomials.size(); ++m)
      for (std::size_t j = 0; j <= R.N; ++j)
        rhs += R.coeffs[m][j] * UX[0].pow(R.monomials[m][0]) * UX[1].pow(R.monomials[m][1]);
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(Auxpoly, RNtIdentityMahlerSystem) {
  Instance inst = canonical_instance(120, 400);
  // s = 1 on G_0, and s = 2 on (G_0, G_1)
  std::vector<CSeries> f1{G0_series(inst, 120)};
  AuxPoly R1 = construct_RN(f1, 2);
  auto rs = RNt_identity_check(inst, R1, 120, 3, 20);
  ASSERT_EQ(rs.size(), 4u);
  for (const auto& r : rs) EXPECT_EQ(r.status, Status::Verified) << r.to_json().dump();

  std::vector<CSeries> f2{G0_series(inst, 120), G_i_series(1, inst, 120)};
  AuxPoly R2 = construct_RN(f2, 3);
  expect_auxpoly_laws(R2, f2);
  rs = RNt_identity_check(inst, R2, 120, 3, 20);
  for (const auto& r : rs) {
    EXPECT_EQ(r.status, Status::Verified) << r.to_json().dump();
    EXPECT_EQ(r.details["homogeneous_degree"].get<long>(), 3);
  }

  // any R satisfies the identity, so the control corrupts the system: the displayed sign of M_1
  std::function<Matrix<LocalFieldElem>(unsigned)> flipped = [&](unsigned k) {
    Matrix<LocalFieldElem> A = system_at_orbit_point(inst, k, inst.ctx.cap());
    A(1, 2) = -A(1, 2);
    return A;
  };
  auto rb = RNt_identity_check(inst, R2, 120, 2, 20, flipped);
  EXPECT_EQ(rb[0].status, Status::Verified);  // t = 0 does not see A
  EXPECT_EQ(rb[1].status, Status::Failed);
  EXPECT_EQ(rb[2].status, Status::Failed);
}

TEST(Auxpoly, ENValuationScan) {
  Instance inst = canonical_instance(120, 400);
  RatFuncEvaluator ev(inst.ctx.emb);
  const LocalFieldElem u = inst.u();
  const CSeries lg = carlitz_log_series(F3(), 40);
  const TailBound flat{Rational(0), Rational(0), Rational(0), 3};

  // E_N = z^2 exactly
  AuxPoly mono = manual(2, 1, {{{{0}, 2}, inst.one()}});
  normalize_auxpoly(mono, {lg});
  CheckRecord r = EN_valuation_scan(mono, {lg}, {flat}, u, ev, 3, 4);
  EXPECT_EQ(r.status, Status::Evidence) << r.to_json().dump();
  EXPECT_EQ(r.details["c0"].get<unsigned>(), 0u);
  for (const auto& row : r.details["rows"]) EXPECT_TRUE(row["equal"].get<bool>());

  // constructed R for log_C at alpha = u, d = q
  AuxPoly R = construct_RN({lg}, 3);
  r = EN_valuation_scan(R, {lg}, {flat}, u, ev, 3, 3);
  EXPECT_EQ(r.status, Status::Evidence) << r.to_json().dump();
  ASSERT_TRUE(r.details.contains("c0"));
  const unsigned c0 = r.details["c0"].get<unsigned>();
  for (const auto& row : r.details["rows"]) {
    if (row["t"].get<unsigned>() >= c0) {
      EXPECT_TRUE(row["equal"].get<bool>());
    }
  }

  // v(alpha) = 0 and an exhausted budget
  expect_kind([&] { EN_valuation_scan(R, {lg}, {flat}, LocalFieldElem::one(inst.field(), 2), ev, 3, 2); },
              ErrorKind::NonpositiveValuation);
  expect_kind([&] { EN_valuation_scan(R, {lg}, {flat}, u, ev, 3, 6); }, ErrorKind::PrecisionExhausted);
}
