#pragma once

#include "mahlerlog/ffcore/linalg.hpp"
#include "mahlerlog/interp.hpp"

#include <algorithm>
#include <numeric>

namespace mahlerlog {

/// The q^d-Mahler system (G_0, ..., G_n, 1)(Z^{q^d}) = A (G_0, ..., G_n, 1)(Z)
/// with entries truncated modulo Z^prec.
///
/// Sign convention: the last column carries -pi_d M_i (and A^{-1} carries
/// +M_i), which is what G_i(Z^{q^d}) = pi_d (G_i - M_i) forces.
struct MahlerSystem {
  unsigned d = 1;
  long prec = 0;
  Matrix<ZSeries> A;
  Matrix<ZSeries> A_inv;
  const Instance* inst = nullptr;

  std::size_t size() const { return A.rows(); }
};

inline MahlerSystem build_system(const Instance& inst, long prec) {
  const unsigned d = inst.d();
  const std::size_t n = inst.n();
  const ZSeries zero = ZSeries::zero(inst.one(), 'Z');
  const ZSeries one = ZSeries::constant(inst.one(), 'Z');
  const ZSeries pid = pi_k_deformed(d, inst, prec);
  const ZSeries pid_inv = inv_pi_k_deformed(d, inst, prec);
  const long long dd = static_cast<long long>(d);
  MahlerSystem sys{d, prec, Matrix<ZSeries>(n + 2, n + 2, zero), Matrix<ZSeries>(n + 2, n + 2, zero), &inst};
  sys.A(0, 0) = pid.scaled(inst.beta.pow(dd));
  sys.A_inv(0, 0) = pid_inv.scaled(inst.beta.pow(-dd));
  for (std::size_t i = 1; i <= n; ++i) {
    const ZSeries mi = M_i_series(i, inst, prec);
    sys.A(i, i) = pid;
    sys.A(i, n + 1) = -(pid * mi).truncated(prec);
    sys.A_inv(i, i) = pid_inv;
    sys.A_inv(i, n + 1) = mi;
  }
  sys.A(n + 1, n + 1) = one;
  sys.A_inv(n + 1, n + 1) = one;
  return sys;
}

namespace detail {

inline CheckRecord matrix_agreement(std::string id, const Matrix<ZSeries>& got, const Matrix<ZSeries>& want,
                                    long min_window) {
  bool equal = true;
  long window = kExact;
  json bad = json::array();
  for (std::size_t i = 0; i < got.rows(); ++i)
    for (std::size_t j = 0; j < got.cols(); ++j) {
      auto a = got(i, j).compare(want(i, j));
      window = std::min(window, a.window);
      if (!a.equal) {
        equal = false;
        bad.push_back(json{{"row", i}, {"col", j}, {"first_nonzero", a.first_diff}});
      }
    }
  CheckRecord r{std::move(id), equal && window >= min_window ? Status::Verified : Status::Failed, window,
                json::object()};
  if (!bad.empty()) r.details["mismatches"] = bad;
  return r;
}

inline ZSeries at_power(const ZSeries& a, unsigned long q, unsigned r) {
  return substitute_q_power(a, q, r);
}

}  // namespace detail

/// A * A^{-1} = I entrywise modulo Z^prec.
inline CheckRecord system_inverse_check(const MahlerSystem& sys, long min_window = 0) {
  const ZSeries zero = ZSeries::zero(sys.inst->one(), 'Z');
  const ZSeries one = ZSeries::constant(sys.inst->one(), 'Z');
  Matrix<ZSeries> prod = (sys.A * sys.A_inv).map([&](const ZSeries& s) { return s.truncated(sys.prec); });
  return detail::matrix_agreement("mahler.system_inverse", prod, Matrix<ZSeries>::identity(sys.size(), zero, one),
                                  min_window);
}

/// A (G_0, ..., G_n, 1) = (G_0, ..., G_n, 1)(Z^{q^d}).
inline CheckRecord system_action_check(const MahlerSystem& sys, long min_window = 0) {
  const Instance& inst = *sys.inst;
  const std::size_t n = inst.n();
  std::vector<ZSeries> g{G0_series(inst, sys.prec)};
  for (std::size_t i = 1; i <= n; ++i) g.push_back(G_i_series(i, inst, sys.prec));
  g.push_back(ZSeries::constant(inst.one(), 'Z'));
  std::vector<ZSeries> lhs = sys.A.apply(g);
  bool equal = true;
  long window = kExact;
  json rows = json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto a = lhs[i].compare(detail::at_power(g[i], inst.q(), sys.d));
    window = std::min(window, a.window);
    equal = equal && a.equal;
    rows.push_back(json{{"row", i}, {"equal", a.equal}, {"window", window_json(a.window)}});
  }
  return {"mahler.system_action", equal && window >= min_window ? Status::Verified : Status::Failed, window,
          json{{"rows", rows}}};
}

/// pi_k(Z^{q^d}) pi_d = pi_{k+d} for k = 1..k_max, G_0(Z^{q^d}) = beta^d pi_d G_0,
/// G_i(Z^{q^d}) = pi_d (G_i - M_i).
inline std::vector<CheckRecord> verify_functional_equations(const Instance& inst, long prec, unsigned k_max = 2,
                                                            long min_window = 0) {
  const unsigned d = inst.d();
  const unsigned long q = inst.q();
  std::vector<CheckRecord> out;
  const ZSeries pid = pi_k_deformed(d, inst, prec);
  for (unsigned k = 1; k <= k_max; ++k) {
    ZSeries lhs = (detail::at_power(pi_k_deformed(k, inst, prec), q, d) * pid).truncated(prec);
    out.push_back(agreement_record("mahler.pi_shift_k" + std::to_string(k),
                                   lhs.compare(pi_k_deformed(k + d, inst, prec)), min_window));
  }
  const ZSeries g0 = G0_series(inst, prec);
  out.push_back(agreement_record("mahler.functional_G0",
                                 detail::at_power(g0, q, d).compare((pid * g0).scaled(inst.beta.pow(d))), min_window));
  for (std::size_t i = 1; i <= inst.n(); ++i) {
    const ZSeries gi = G_i_series(i, inst, prec);
    const ZSeries rhs = pid * (gi - M_i_series(i, inst, prec));
    out.push_back(agreement_record("mahler.functional_G" + std::to_string(i), detail::at_power(gi, q, d).compare(rhs),
                                   min_window));
  }
  return out;
}

/// G_i(Z^{q^{kd}}) / pi_{kd} = G_i - sum_{j<k} M_i(Z^{q^{jd}}) / pi_{jd} for k = 1..K,
/// and v_Z of the difference G_i - partial sum is at least q^{kd}.
inline std::vector<CheckRecord> recurrence_check(const Instance& inst, unsigned K, long prec) {
  const unsigned d = inst.d();
  const unsigned long q = inst.q();
  require(K >= 1, ErrorKind::InvalidArgument, "at least one iteration required");
  require(static_cast<long>(ipow(q, K * d)) < prec, ErrorKind::PrecisionExhausted,
          "q^{Kd} exceeds the Z-precision");
  std::vector<CheckRecord> out;
  for (std::size_t i = 1; i <= inst.n(); ++i) {
    const ZSeries gi = G_i_series(i, inst, prec);
    const ZSeries mi = M_i_series(i, inst, prec);
    ZSeries partial = ZSeries::zero(inst.one(), 'Z');
    for (unsigned k = 1; k <= K; ++k) {
      const unsigned j = k - 1;
      partial = partial + (detail::at_power(mi, q, j * d) * inv_pi_k_deformed(j * d, inst, prec)).truncated(prec);
      const ZSeries lhs = (detail::at_power(gi, q, k * d) * inv_pi_k_deformed(k * d, inst, prec)).truncated(prec);
      const ZSeries diff = (gi - partial).truncated(prec);
      const std::string tag = "G" + std::to_string(i) + "_k" + std::to_string(k);
      out.push_back(agreement_record("mahler.recurrence_" + tag, lhs.compare(diff), 0));
      const long floor = static_cast<long>(ipow(q, k * d));
      const long v = diff.valuation().value_or(diff.prec());
      out.push_back({"mahler.recurrence_gap_" + tag, v >= floor ? Status::Evidence : Status::Failed, prec,
                     json{{"v_Z", v}, {"floor", floor}}});
    }
  }
  return out;
}

/// Closed forms of the entries at z = u^{q^{jd}}.
inline RatFunc pi_d_orbit_closed_form(const Instance& inst, unsigned j) {
  const unsigned d = inst.d();
  RatFunc r = inst.beta.pow(-static_cast<long long>(d));
  for (unsigned k = j * d + 1; k <= (j + 1) * d; ++k)
    r = r * (inst.one() - inst.theta().pow(1 - static_cast<long long>(ipow(inst.q(), k)))).pow(inst.s);
  return r;
}

inline LocalFieldElem M_i_orbit_closed_form(const Instance& inst, std::size_t i, unsigned j, RatFuncEvaluator& ev,
                                            long target) {
  const unsigned d = inst.d();
  const long cap = inst.ctx.cap();
  const GaloisField* F = inst.field();
  const LocalFieldElem x = inst.targets.at(i - 1) * inst.ctx.theta_tilde_theta().inverse(cap);
  const RatFunc front = carlitz_pi_scalar(F, j * d, inst.h()).pow(inst.s) * inst.beta.pow(-static_cast<long long>(j * d));
  LocalFieldElem acc = LocalFieldElem::zero(F, inst.e());
  for (unsigned k = j * d; k < (j + 1) * d; ++k) {
    const RatFunc c = front * inst.beta.pow(k) * carlitz_pi_scalar(F, k, inst.h()).pow(-static_cast<long long>(inst.s));
    acc = acc + (ev.eval(c, target) * x.frobenius_q(k)).truncated(target);
  }
  return acc.truncated(target);
}

/// A(z) at z = u^{q^{jd}} from the closed forms, as a matrix of local values.
inline Matrix<LocalFieldElem> system_at_orbit_point(const Instance& inst, unsigned j, long target) {
  RatFuncEvaluator ev(inst.ctx.emb);
  const std::size_t n = inst.n();
  const LocalFieldElem zero = LocalFieldElem::zero(inst.field(), inst.e());
  const RatFunc pcf = pi_d_orbit_closed_form(inst, j);
  require(!pcf.is_zero(), ErrorKind::PoleAtOrbitPoint, "pi_d vanishes on the orbit");
  const LocalFieldElem pz = ev.eval(pcf, target);
  Matrix<LocalFieldElem> A(n + 2, n + 2, zero);
  A(0, 0) = (ev.eval(inst.beta.pow(inst.d()), target) * pz).truncated(target);
  for (std::size_t i = 1; i <= n; ++i) {
    A(i, i) = pz;
    A(i, n + 1) = -(pz * M_i_orbit_closed_form(inst, i, j, ev, target)).truncated(target);
  }
  A(n + 1, n + 1) = LocalFieldElem::one(inst.field(), inst.e());
  return A;
}

namespace detail {

/// Leibniz determinant for small matrices over a commutative ring.
template <class T>
T small_det(const std::vector<std::vector<T>>& m, const T& zero) {
  const std::size_t n = m.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  T acc = zero;
  do {
    std::size_t inversions = 0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) inversions += perm[a] > perm[b];
    T term = m[0][perm[0]];
    for (std::size_t a = 1; a < n; ++a) term = term * m[a][perm[a]];
    acc = inversions % 2 ? acc - term : acc + term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc;
}

}  // namespace detail

/// Evaluation of the system along u^{q^{jd}}, j = 0..j_max: no poles,
/// closed-form pi_d and M_i agree with the series values, det = beta^d pi_d^{n+1},
/// and the value identity G(z^{q^d}) = A(z) G(z) holds.
inline std::vector<CheckRecord> orbit_evaluate(const Instance& inst, const MahlerSystem& sys, unsigned j_max,
                                               long min_window = 0) {
  const unsigned d = inst.d();
  const std::size_t n = inst.n();
  RatFuncEvaluator ev(inst.ctx.emb);
  std::vector<CheckRecord> out;
  const ZSeries g0 = G0_series(inst, sys.prec);
  std::vector<ZSeries> gi;
  std::vector<ZSeries> mi;
  for (std::size_t i = 1; i <= n; ++i) {
    gi.push_back(G_i_series(i, inst, sys.prec));
    mi.push_back(M_i_series(i, inst, sys.prec));
  }
  const ZSeries pid = pi_k_deformed(d, inst, sys.prec);
  for (unsigned j = 0; j <= j_max; ++j) {
    const std::string tag = "mahler.orbit_j" + std::to_string(j);
    const LocalFieldElem z = inst.u().frobenius_q(j * d);
    const LocalFieldElem zn = inst.u().frobenius_q((j + 1) * d);
    LocalFieldElem pz = LocalFieldElem::zero(inst.field(), inst.e());
    LocalFieldElem pz_closed = pz;
    RatFunc pcf = pi_d_orbit_closed_form(inst, j);
    try {
      pz = evaluate_at_local(pid, z, ev, tail_pi_k(inst, d));
      pz_closed = ev.eval(pcf, pz.prec());
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::PoleAtPoint) fail(ErrorKind::PoleAtOrbitPoint, tag + ": pole of pi_d");
      throw;
    }
    require(!pcf.is_zero(), ErrorKind::PoleAtOrbitPoint, tag + ": pi_d vanishes");
    out.push_back(agreement_record(tag + "_pi_d", pz.compare(pz_closed), min_window,
                                   json{{"closed_form", pcf.to_string()}}));

    std::vector<LocalFieldElem> gz{evaluate_at_local(g0, z, ev, tail_G0(inst))};
    std::vector<LocalFieldElem> gzn{evaluate_at_local(g0, zn, ev, tail_G0(inst))};
    std::vector<LocalFieldElem> mz;
    for (std::size_t i = 1; i <= n; ++i) {
      LocalFieldElem m = evaluate_at_local(mi[i - 1], z, ev, tail_M_i(inst));
      LocalFieldElem mc = M_i_orbit_closed_form(inst, i, j, ev, m.prec());
      out.push_back(agreement_record(tag + "_M" + std::to_string(i), m.compare(mc), min_window));
      mz.push_back(m);
      gz.push_back(evaluate_at_local(gi[i - 1], z, ev, tail_G_i(inst)));
      gzn.push_back(evaluate_at_local(gi[i - 1], zn, ev, tail_G_i(inst)));
    }

    // evaluated matrix and its determinant
    const LocalFieldElem zero = LocalFieldElem::zero(inst.field(), inst.e());
    const LocalFieldElem one = LocalFieldElem::one(inst.field(), inst.e());
    const LocalFieldElem bd = ev.eval(inst.beta.pow(d), kExact);
    std::vector<std::vector<LocalFieldElem>> Az(n + 2, std::vector<LocalFieldElem>(n + 2, zero));
    Az[0][0] = bd * pz;
    for (std::size_t i = 1; i <= n; ++i) {
      Az[i][i] = pz;
      Az[i][n + 1] = -(pz * mz[i - 1]);
    }
    Az[n + 1][n + 1] = one;
    LocalFieldElem det = detail::small_det(Az, zero);
    LocalFieldElem det_closed = ev.eval(inst.beta.pow(d) * pcf.pow(static_cast<long long>(n + 1)), det.prec());
    CheckRecord dr = agreement_record(tag + "_det", det.compare(det_closed), min_window);
    if (det.is_zero_on_window()) {
      dr.status = Status::Failed;
      dr.details["reason"] = "determinant vanishes on the window";
    }
    out.push_back(dr);

    // value identity along the orbit
    LocalFieldElem lhs0 = gzn[0];
    out.push_back(agreement_record(tag + "_consistency_G0", lhs0.compare(bd * pz * gz[0]), min_window));
    for (std::size_t i = 1; i <= n; ++i)
      out.push_back(agreement_record(tag + "_consistency_G" + std::to_string(i),
                                     gzn[i].compare(pz * (gz[i] - mz[i - 1])), min_window));
  }
  return out;
}

struct LinearRelation {
  std::vector<RatFunc> mu;  // polynomials in theta with F_q coefficients
  long residual_valuation = 0;
  std::string status = "CANDIDATE";

  json to_json() const {
    json m = json::array();
    for (const auto& c : mu) m.push_back(c.to_string());
    return json{{"mu", m}, {"residual_u_valuation", window_json(residual_valuation)}, {"status", status}};
  }
};

/// All (mu_0, ..., mu_n) in F_q[theta]^{n+1}, deg mu_i <= B, with
/// sum mu_i lambda_i = 0 modulo u^M, as a reduced basis.  Unknowns are the
/// F_q-coefficients; each u-digit gives an F_{q^d}-linear equation, stacked
/// with its Galois conjugates so that the solution space is defined over F_q.
inline std::vector<LinearRelation> detect_linear_relations(const CarlitzContext& ctx,
                                                           const std::vector<LocalFieldElem>& values, unsigned B,
                                                           long M) {
  require(!values.empty(), ErrorKind::InvalidArgument, "no values");
  const GaloisField* F = ctx.field();
  const long e = ctx.emb.e;
  const std::size_t n1 = values.size();
  const std::size_t cols = n1 * (B + 1);
  const LocalFieldElem th = ctx.theta_image();
  std::vector<LocalFieldElem> thp{LocalFieldElem::one(F, e)};
  for (unsigned j = 1; j <= B; ++j) thp.push_back(thp.back() * th);
  // column order: degree-major, then value index
  std::vector<LocalFieldElem> prods;
  long lo = M;
  for (unsigned j = 0; j <= B; ++j)
    for (std::size_t i = 0; i < n1; ++i) {
      require(values[i].e() == e && values[i].field() == F, ErrorKind::SpecMismatch, "values must share the local field");
      LocalFieldElem p = thp[j] * values[i];
      require(p.prec() >= M, ErrorKind::InsufficientPrecision,
              "theta^" + std::to_string(j) + " * value " + std::to_string(i) + " is known only modulo u^" +
                  std::to_string(p.prec()));
      if (!p.is_zero_on_window()) lo = std::min(lo, p.ord_u());
      prods.push_back(std::move(p));
    }
  require(M - lo >= 2 * static_cast<long>(cols), ErrorKind::InsufficientPrecision,
          "window too short for the number of unknowns");
  const unsigned conj = F->d();
  Matrix<FieldElem> sys(static_cast<std::size_t>(M - lo) * conj, cols, FieldElem(F, 0));
  for (long t = lo; t < M; ++t)
    for (std::size_t c = 0; c < cols; ++c) {
      const FieldElem dg = prods[c].digit(t);
      for (unsigned g = 0; g < conj; ++g) sys(static_cast<std::size_t>(t - lo) * conj + g, c) = dg.frobenius_q(g);
    }
  std::vector<LinearRelation> out;
  const RatFunc theta = RatFunc::theta(F, ctx.h());
  for (auto& v : sys.nullspace(FieldElem(F, 0), FieldElem(F, 1))) {
    for (const auto& x : v)
      require(F->in_constant_field(x.code()), ErrorKind::InvalidArgument, "relation not defined over F_q");
    // normalize: the first nonzero mu_i is monic
    std::size_t lead_i = n1;
    unsigned lead_deg = 0;
    for (std::size_t i = 0; i < n1 && lead_i == n1; ++i)
      for (unsigned j = B + 1; j-- > 0;)
        if (!v[j * n1 + i].is_zero()) {
          lead_i = i;
          lead_deg = j;
          break;
        }
    const FieldElem scale = v[lead_deg * n1 + lead_i].inverse();
    LinearRelation rel;
    LocalFieldElem residual = LocalFieldElem::zero(F, e);
    for (std::size_t i = 0; i < n1; ++i) {
      RatFunc mu = RatFunc::zero(F, ctx.h());
      for (unsigned j = 0; j <= B; ++j) {
        const FieldElem c = v[j * n1 + i] * scale;
        if (c.is_zero()) continue;
        mu = mu + theta.pow(j) * c;
        residual = residual + prods[j * n1 + i] * c;
      }
      rel.mu.push_back(mu);
    }
    residual = residual.truncated(M);
    rel.residual_valuation = residual.is_zero_on_window() ? residual.prec() : residual.ord_u();
    out.push_back(std::move(rel));
  }
  return out;
}

}  // namespace mahlerlog
