#pragma once

#include "mahlerlog/auxpoly.hpp"
#include "mahlerlog/carlitz.hpp"
#include "mahlerlog/config.hpp"
#include "mahlerlog/heights.hpp"
#include "mahlerlog/interp.hpp"
#include "mahlerlog/mahler.hpp"
#include "mahlerlog/report.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace mahlerlog {

// ---------------------------------------------------------------------------
// helpers shared by the suites, the CLI and the acceptance binary

inline json local_json(const LocalFieldElem& x) {
  json digits = json::array();
  if (!x.is_zero_on_window())
    for (long n = x.ord_u(); n < x.prec() && n < x.ord_u() + 4096; ++n) digits.push_back(x.digit(n).code());
  return {{"ord", x.is_zero_on_window() ? x.prec() : x.ord_u()},
          {"prec", x.prec() >= kExact ? json("exact") : json(x.prec())},
          {"digits", digits}};
}

/// Uniform random polynomial over F_q of degree <= deg.
inline Poly sample_poly(std::mt19937_64& rng, const GaloisField* F, long deg, bool nonzero) {
  for (;;) {
    std::vector<GaloisField::Code> c;
    for (long i = 0; i <= deg; ++i) c.push_back(static_cast<GaloisField::Code>(rng() % F->order()));
    Poly p(F, c);
    if (!nonzero || !p.is_zero()) return p;
  }
}

inline RatFunc sample_k(std::mt19937_64& rng, const GaloisField* F, long num_deg = 3, long den_deg = 2) {
  return RatFunc(sample_poly(rng, F, static_cast<long>(rng() % (num_deg + 1)), false),
                 sample_poly(rng, F, static_cast<long>(rng() % (den_deg + 1)), true));
}

/// Z-precision needed for theta tilde_theta G(u) known to `window` u-digits: each Z-degree
/// gains e (v(u) - slope) u-digits, and the factor theta tilde_theta costs its u-order.
inline long zprec_for_window(const Instance& inst, long window) {
  const Rational rate = Rational(inst.e()) * (Rational(1, inst.e()) - coeff_slope(inst));
  const long loss = std::max(0L, -inst.ctx.theta_tilde_theta().ord_u());
  return static_cast<long>(ceil(Rational(window + loss) / rate)) + 8;
}

/// Series used for the auxiliary-polynomial cases: log_C, exp_C, then log_C(theta^j z).
inline CSeries aux_series(const GaloisField* F, unsigned h, std::size_t k, long prec) {
  if (k == 0) return carlitz_log_series(F, prec, h);
  if (k == 1) return carlitz_exp_series(F, prec, h);
  return scale_variable(carlitz_log_series(F, prec, h), RatFunc::theta(F, h).pow(static_cast<long long>(k - 1)));
}

/// Valuation scan at alpha = u, Mahler degree q, with the horizon grown until equality
/// is observed on c0 <= t <= c0 + extra (or t_limit is reached).
inline CheckRecord aux_valuation_scan(const Instance& inst, const AuxPoly& R, const std::vector<CSeries>& fs,
                                      unsigned extra, unsigned t_limit = 8) {
  const std::vector<TailBound> tails(fs.size(), TailBound{Rational(0), Rational(0), Rational(0), inst.q()});
  const LocalFieldElem u = inst.u();
  unsigned t_max = extra;
  for (;;) {
    LocalEmbedding emb = inst.ctx.emb;
    emb.cap = std::max(emb.cap, R.n_N * static_cast<long>(ipow(inst.q(), t_max)) * u.ord_u() + 64);
    RatFuncEvaluator ev(emb);
    CheckRecord r = EN_valuation_scan(R, fs, tails, u, ev, inst.q(), t_max);
    r.details["u_budget"] = emb.cap;
    r.window = emb.cap;
    if (r.details.contains("c0")) {
      const unsigned c0 = r.details["c0"].get<unsigned>();
      if (c0 + extra <= t_max) return r;
      t_max = c0 + extra;
    } else {
      ++t_max;
    }
    if (t_max > t_limit) {
      r.status = Status::Failed;
      r.details["reason"] = "no stable equality within t <= " + std::to_string(t_limit);
      return r;
    }
  }
}

// ---------------------------------------------------------------------------
// suites; `mutate` applies the suite's negative-control fixture

inline Report carlitz_suite(const RunConfig& cfg, bool mutate) {
  Report rep{"carlitz", {}};
  const Instance inst = build_instance(cfg, 2);
  const CarlitzContext& ctx = inst.ctx;
  const GaloisField* F = ctx.field();
  const unsigned h = ctx.h();
  rep.run("carlitz.exp_functional", [&] {
    if (!mutate) return verify_exp_functional(F, cfg.prec_z, h);
    // corrupted fixture: the z^q coefficient of exp_C shifted by 1
    CSeries ex = carlitz_exp_series(F, cfg.prec_z, h);
    ex = ex + CSeries::monomial(RatFunc::one(F, h), static_cast<long>(F->q()), 'z');
    const RatFunc t = RatFunc::theta(F, h);
    CSeries res = scale_variable(ex, t) - ex.scaled(t) - ex.pow(F->q(), cfg.prec_z);
    return identity_record("carlitz.exp_functional", res.is_zero_on_window(), res.prec(), res.ord(),
                           json{{"prec", cfg.prec_z}, {"fixture", "corrupted exp_C coefficient"}});
  });
  try {
    for (auto& r : verify_exp_log_inverse(F, cfg.prec_z, h)) rep.add(r);
  } catch (const Error& e) {
    rep.add(error_record("carlitz.exp_log_inverse", e));
  }
  rep.run("carlitz.L_valuation", [&] { return verify_L_valuation(F, 6, h); });
  try {
    for (auto& r : verify_pi_identity(ctx, 5)) rep.add(r);
  } catch (const Error& e) {
    rep.add(error_record("carlitz.pi_identity", e));
  }
  return rep;
}

inline Report interp_suite(const RunConfig& cfg, bool mutate) {
  Report rep{"interp", {}};
  const long window = std::min<long>(300, cfg.prec_u - 50);
  // the value identities are stated for G(u, beta = 1, s = 1)
  RunConfig unit = cfg;
  unit.beta = RatFuncSpec{{1}, {1}};
  unit.s = 1;
  const Instance probe = build_instance(unit, 2);
  const long zv = std::max(cfg.prec_z, zprec_for_window(probe, window));
  const Instance inst = build_instance(unit, zv);
  RatFuncEvaluator ev(inst.ctx.emb);
  const LocalFieldElem tt = inst.ctx.theta_tilde_theta();
  const long cap = inst.ctx.cap();
  rep.run("interp.G0_value", [&] {
    LocalFieldElem g0u = evaluate_at_local(G0_series(inst, zv), inst.u(), ev, tail_G0(inst));
    return agreement_record("interp.G0_value", (tt * g0u).truncated(cap).compare(tilde_pi(inst.ctx, cap).value),
                            window, json{{"prec_z", zv}});
  });
  for (std::size_t i = 1; i <= inst.n(); ++i) {
    const std::string id = "interp.G" + std::to_string(i) + "_value";
    rep.run(id, [&] {
      LocalFieldElem giu = evaluate_at_local(G_i_series(i, inst, zv), inst.u(), ev, tail_G_i(inst));
      return agreement_record(id, (tt * giu).truncated(cap).compare(carlitz_log_at(inst.ctx, inst.targets[i - 1])),
                              window, json{{"prec_z", zv}});
    });
  }
  const long ps = std::min<long>(cfg.prec_z, 120);
  try {
    const Instance small = build_instance(cfg, ps);
    if (!mutate) {
      for (auto& r : sigma_action_check(small, ps, 60)) rep.add(r);
    } else {
      // corrupted fixture: G_1 + Z^7 in place of G_1
      ZSeries pi1 = pi_k_deformed(1, small, ps);
      ZSeries g1 = G_i_series(1, small, ps) + ZSeries::monomial(small.one(), 7, 'Z');
      ZSeries rhs = pi1 * (g1 - small.li_series(1));
      rep.add(agreement_record("interp.sigma_G1", sigma(g1).truncated(ps).compare(rhs.truncated(ps)), 60,
                               json{{"fixture", "G_1 + Z^7"}}));
    }
  } catch (const Error& e) {
    rep.add(error_record("interp.sigma", e));
  }
  for (std::size_t i = 1; i <= inst.n(); ++i)
    rep.run("interp.convergence_witness_" + std::to_string(i),
            [&] { return convergence_witness(build_instance(cfg, ps), i, inst.u(), 6); });
  return rep;
}

inline Report mahler_suite(const RunConfig& cfg, bool mutate) {
  Report rep{"mahler", {}};
  const Instance inst = build_instance(cfg);
  const long prec = cfg.prec_z;
  try {
    MahlerSystem sys = build_system(inst, prec);
    if (mutate) sys.A(1, inst.n() + 1) = sys.A(1, inst.n() + 1) + ZSeries::monomial(inst.one(), 11, 'Z');
    CheckRecord inv = system_inverse_check(sys, prec);
    CheckRecord act = system_action_check(sys, prec);
    if (mutate) act.details["fixture"] = inv.details["fixture"] = "A(1, n+1) + Z^11";
    rep.add(inv);
    rep.add(act);
    for (auto& r : verify_functional_equations(inst, prec, 3, std::min<long>(prec, 100))) rep.add(r);
    const unsigned K = inst.d() == 1 ? 3 : 1;
    for (auto& r : recurrence_check(inst, K, prec)) rep.add(r);
    for (auto& r : orbit_evaluate(inst, sys, inst.d() == 1 ? 4 : 2, 30)) rep.add(r);
  } catch (const Error& e) {
    rep.add(error_record("mahler.system", e));
  }
  const CarlitzContext& ctx = inst.ctx;
  const long M = cfg.relation_precision;
  rep.run("mahler.relations_planted", [&] {
    LocalFieldElem lam = carlitz_log_at(ctx, inst.targets[0]);
    auto rels = detect_linear_relations(ctx, {lam, ctx.theta_image() * lam}, 1, M);
    const bool ok = rels.size() == 1 && rels[0].mu[0] == inst.theta() && rels[0].mu[1] == -inst.one();
    json found = json::array();
    for (const auto& r : rels) found.push_back(r.to_json());
    return CheckRecord{"mahler.relations_planted", ok ? Status::Verified : Status::Failed, M,
                       json{{"relations", found}, {"expected", json::array({"theta", "-1"})}}};
  });
  rep.run("mahler.relations_pi_log", [&] {
    LocalFieldElem pi = tilde_pi(ctx, ctx.cap()).value;
    std::vector<LocalFieldElem> vals{pi};
    for (const auto& t : inst.targets) vals.push_back(carlitz_log_at(ctx, t));
    auto rels = detect_linear_relations(ctx, vals, cfg.relation_degree, M);
    json found = json::array();
    for (const auto& r : rels) found.push_back(r.to_json());
    return CheckRecord{"mahler.relations_pi_log", rels.empty() ? Status::Evidence : Status::Failed, M,
                       json{{"degree", cfg.relation_degree}, {"relations", found}}};
  });
  return rep;
}

inline Report heights_suite(const RunConfig& cfg, bool mutate) {
  Report rep{"heights", {}};
  const GaloisField* F = GaloisField::make(cfg.p, cfg.m, 1).get();
  const RatFunc th = RatFunc::theta(F);
  std::mt19937_64 rng(cfg.seed);
  rep.run("heights.weil_vs_degree", [&] {
    unsigned checked = 0, bad = 0;
    json first_bad;
    // zero samples are redrawn, so exactly height_fractions fractions are checked
    while (checked < cfg.height_fractions) {
      RatFunc a = sample_k(rng, F, 8, 8);
      if (a.is_zero()) continue;
      ++checked;
      // corrupted fixture: the formula is read off theta * a
      const RatFunc b = mutate ? a * th : a;
      const Rational want(std::max(b.num().degree(), b.den().degree()));
      if (weil_height(a) != want) {
        if (!bad) first_bad = a.to_string();
        ++bad;
      }
    }
    json det{{"checked", checked}, {"mismatches", bad}};
    if (bad) det["first_mismatch"] = first_bad;
    if (mutate) det["fixture"] = "degree formula applied to theta * a";
    return CheckRecord{"heights.weil_vs_degree", bad ? Status::Failed : Status::Verified, kExact, det};
  });
  rep.run("heights.height_inequality_families", [&] {
    unsigned checked = 0, bad = 0;
    while (checked < cfg.height_families) {
      std::vector<AlgebraicElem> fam;
      for (int j = 0; j < 3; ++j) {
        RatFunc x = sample_k(rng, F);
        if (!x.is_zero()) fam.push_back(AlgebraicElem::from_k(x));
      }
      if (fam.empty()) continue;
      ++checked;
      if (!check_height_inequality(fam).ok()) ++bad;
    }
    return CheckRecord{"heights.height_inequality_families", bad ? Status::Failed : Status::Verified, kExact,
                       json{{"checked", checked}, {"violations", bad}}};
  });
  rep.run("heights.house_laws", [&] {
    unsigned checked = 0, bad = 0;
    while (checked < cfg.house_pairs) {
      QuadraticElem x{sample_k(rng, F), sample_k(rng, F), -th};
      QuadraticElem y{sample_k(rng, F), sample_k(rng, F), -th};
      if (x.is_zero() || y.is_zero()) continue;
      ++checked;
      // -theta is not a square in k, so every minpoly here is irreducible;
      // the full validating path runs on the first pair only
      auto H = [&](const QuadraticElem& z) {
        return checked == 1 ? house(z.algebraic()) : house_of_poly(z.algebraic().minpoly);
      };
      const Rational hx = H(x), hy = H(y);
      const QuadraticElem s = x + y;
      bool ok = s.is_zero() || H(s) <= std::max(hx, hy);
      ok = ok && H(x * y) <= hx + hy;
      const unsigned n = 1 + static_cast<unsigned>(rng() % 4);
      ok = ok && H(x.pow(n)) == Rational(n) * hx;
      if (!ok) ++bad;
    }
    return CheckRecord{"heights.house_laws", bad ? Status::Failed : Status::Verified, kExact,
                       json{{"checked", checked}, {"violations", bad}}};
  });
  if (cfg.philippon) {
    try {
      for (auto& r : philippon_condition_check(*cfg.philippon)) rep.add(r);
    } catch (const Error& e) {
      rep.add(error_record("heights.philippon", e));
    }
  }
  return rep;
}

inline Report auxpoly_suite(const RunConfig& cfg, bool mutate) {
  Report rep{"auxpoly", {}};
  const Instance inst = build_instance(cfg);
  const GaloisField* F = inst.field();
  for (const auto& [s, N] : cfg.aux_cases) {
    const std::string tag = "_s" + std::to_string(s) + "_N" + std::to_string(N);
    try {
      std::vector<CSeries> fs;
      for (unsigned k = 0; k < s; ++k) fs.push_back(aux_series(F, inst.h(), k, cfg.prec_z));
      AuxPoly R = construct_RN(fs, N);
      const CSeries E = E_N_series(R, fs);
      const bool ok = E.valuation() == std::optional<long>(R.n_N) && R.n_N >= R.required_order &&
                      E.coeff(R.n_N).is_one() && R.unknowns > R.equations;
      json det = R.summary();
      det.erase("terms");
      rep.add({"auxpoly.construct" + tag, ok ? Status::Verified : Status::Failed, E.prec(), det});
      CheckRecord scan = aux_valuation_scan(inst, R, fs, cfg.aux_extra_steps);
      scan.id = "auxpoly.valuation_scan" + tag;
      rep.add(scan);
    } catch (const Error& e) {
      rep.add(error_record("auxpoly.construct" + tag, e));
    }
  }
  // transported polynomials on the Mahler system (G_0, G_1, ..., 1)
  try {
    const long pz = std::min<long>(cfg.prec_z, 120);
    const Instance small = build_instance(cfg, pz);
    AuxPoly R = construct_RN({G0_series(small, pz)}, 2);
    std::function<Matrix<LocalFieldElem>(unsigned)> A_eval;
    if (mutate)
      A_eval = [&](unsigned k) {
        Matrix<LocalFieldElem> A = system_at_orbit_point(small, k, small.ctx.cap());
        A(0, 0) = A(0, 0) + small.u();
        return A;
      };
    for (auto& r : RNt_identity_check(small, R, pz, 3, 20, A_eval)) {
      if (mutate) r.details["fixture"] = "A(0,0) + u";
      rep.add(r);
    }
  } catch (const Error& e) {
    rep.add(error_record("auxpoly.RNt_identity", e));
  }
  return rep;
}

inline Report run_suite(const std::string& name, const RunConfig& cfg) {
  const bool mutate = cfg.negative_control && *cfg.negative_control == name;
  try {
    if (name == "carlitz") return carlitz_suite(cfg, mutate);
    if (name == "interp") return interp_suite(cfg, mutate);
    if (name == "mahler") return mahler_suite(cfg, mutate);
    if (name == "heights") return heights_suite(cfg, mutate);
    if (name == "auxpoly") return auxpoly_suite(cfg, mutate);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    Report rep{name, {}};
    rep.add(error_record(name + ".setup", e));
    return rep;
  }
  fail(ErrorKind::ConfigError, "unknown suite \"" + name + "\"");
}

/// Runs the selected suites ("all" or one name) and collects one report per suite.
inline std::vector<Report> run_suites(const RunConfig& cfg) {
  std::vector<Report> out;
  for (const auto& name : suite_names())
    if (cfg.suite == "all" || cfg.suite == name) out.push_back(run_suite(name, cfg));
  return out;
}

}  // namespace mahlerlog
