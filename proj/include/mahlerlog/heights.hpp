#pragma once

#include "mahlerlog/ffcore/factor.hpp"
#include "mahlerlog/report.hpp"
#include "mahlerlog/series/evaluate.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <optional>
#include <vector>

namespace mahlerlog {

/// Univariate polynomial over k = F_q(theta), coefficients from degree 0 up.
using KPoly = std::vector<RatFunc>;

namespace detail {

inline void require_k(const RatFunc& a) {
  require(a.level() == 0, ErrorKind::UnsupportedRootLevel, "heights are computed over k = F_q(theta)");
  require(a.field()->d() == 1, ErrorKind::SpecMismatch, "heights need coefficients in F_q");
}

inline KPoly kpoly_trim(KPoly f) {
  while (!f.empty() && f.back().is_zero()) f.pop_back();
  return f;
}

inline RatFunc kpoly_eval(const KPoly& f, const RatFunc& y) {
  RatFunc acc = y.zero();
  for (std::size_t i = f.size(); i-- > 0;) acc = acc * y + f[i];
  return acc;
}

inline KPoly kpoly_derivative(const KPoly& f) {
  KPoly out;
  for (std::size_t i = 1; i < f.size(); ++i) out.push_back(f[i] * FieldElem::from_int(*f[i].field(), static_cast<long long>(i)));
  return kpoly_trim(out);
}

inline KPoly kpoly_mod(KPoly a, const KPoly& b) {
  a = kpoly_trim(std::move(a));
  const RatFunc lead_inv = b.back().inverse();
  while (a.size() >= b.size()) {
    const RatFunc f = a.back() * lead_inv;
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = a[shift + i] - f * b[i];
    a = kpoly_trim(std::move(a));
  }
  return a;
}

inline KPoly kpoly_gcd(KPoly a, KPoly b) {
  a = kpoly_trim(std::move(a));
  b = kpoly_trim(std::move(b));
  while (!b.empty()) {
    KPoly r = kpoly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

/// c f with c in k chosen so that the coefficients are coprime polynomials.
inline std::vector<Poly> primitive_part(const KPoly& f) {
  const GaloisField* F = f.front().field();
  Poly L = Poly::one(F);
  for (const auto& c : f) L = lcm(L, c.den());
  std::vector<Poly> out;
  Poly g(F);
  for (const auto& c : f) {
    out.push_back(c.num() * (L / c.den()));
    g = g.is_zero() ? out.back() : gcd(g, out.back());
  }
  for (auto& c : out) c = c / g;
  return out;
}

inline std::vector<Poly> monic_divisors(const Poly& a) {
  std::vector<Poly> out{Poly::one(a.field())};
  for (const auto& [p, k] : factor(a)) {
    std::vector<Poly> next;
    for (const auto& dv : out) {
      Poly acc = dv;
      for (int i = 0; i <= k; ++i) {
        next.push_back(acc);
        acc = acc * p;
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace detail

/// Roots of f in k, by the rational root test on the primitive integral form.
inline std::vector<RatFunc> roots_in_k(const KPoly& f0) {
  const KPoly f = detail::kpoly_trim(f0);
  require(f.size() >= 2, ErrorKind::InvalidArgument, "polynomial of degree at least 1 required");
  for (const auto& c : f) detail::require_k(c);
  const GaloisField* F = f.front().field();
  std::vector<RatFunc> roots;
  if (f[0].is_zero()) roots.push_back(RatFunc::zero(F));
  std::size_t lo = 0;
  while (f[lo].is_zero()) ++lo;
  const std::vector<Poly> A = detail::primitive_part(KPoly(f.begin() + static_cast<long>(lo), f.end()));
  if (A.size() < 2) return roots;
  const auto nums = detail::monic_divisors(A.front());
  const auto dens = detail::monic_divisors(A.back());
  for (const auto& P : nums)
    for (const auto& Q : dens) {
      if (!gcd(P, Q).is_one()) continue;
      for (auto c : F->constant_field_elements()) {
        if (c == 0) continue;
        RatFunc y(P * FieldElem(F, c), Q);
        if (detail::kpoly_eval(f, y).is_zero()) roots.push_back(y);
      }
    }
  return roots;
}

/// Irreducibility over k: no root in k and, for separable input, squarefree.
/// This is a complete test in degree <= 3.
inline bool is_irreducible_over_k(const KPoly& f0) {
  const KPoly f = detail::kpoly_trim(f0);
  if (f.size() <= 1) return false;
  if (f.size() == 2) return true;
  if (!roots_in_k(f).empty()) return false;
  const KPoly df = detail::kpoly_derivative(f);
  if (!df.empty() && detail::kpoly_gcd(f, df).size() > 1) return false;
  return true;
}

/// An algebraic element over k presented by its monic minimal polynomial,
/// optionally with a local image.
struct AlgebraicElem {
  KPoly minpoly;
  std::optional<LocalFieldElem> embedding;

  static AlgebraicElem from_k(const RatFunc& a) { return {{-a, a.one()}, std::nullopt}; }
  std::size_t degree() const { return minpoly.size() - 1; }
  bool in_k() const { return degree() == 1; }
  RatFunc value_in_k() const {
    require(in_k(), ErrorKind::InvalidArgument, "element is not in k");
    return -minpoly[0];
  }
};

inline void validate(const AlgebraicElem& a) {
  require(a.minpoly.size() >= 2 && !a.minpoly.back().is_zero(), ErrorKind::InvalidArgument, "empty minimal polynomial");
  require(a.minpoly.back().is_one(), ErrorKind::InvalidArgument, "minimal polynomial must be monic");
  for (const auto& c : a.minpoly) detail::require_k(c);
  require(is_irreducible_over_k(a.minpoly), ErrorKind::ReducibleInput, "minimal polynomial is reducible over k");
}

struct NewtonSegment {
  Rational slope;
  long length;
};

/// Lower convex hull of (i, v_inf(a_i)); roots of valuation -slope, `length` of each.
inline std::vector<NewtonSegment> newton_polygon(const KPoly& f) {
  std::vector<std::pair<long, Rational>> pts;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!f[i].is_zero()) pts.emplace_back(static_cast<long>(i), *f[i].v_inf());
  std::vector<std::pair<long, Rational>> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      // drop b when it lies on or above the segment a-p
      if ((b.second - a.second) * Rational(p.first - a.first) >= (p.second - a.second) * Rational(b.first - a.first))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  std::vector<NewtonSegment> out;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    const long len = hull[i].first - hull[i - 1].first;
    out.push_back({(hull[i].second - hull[i - 1].second) / Rational(len), len});
  }
  return out;
}

/// house(alpha) = max over conjugates of -v_inf, i.e. the largest Newton slope.
inline Rational house_of_poly(const KPoly& f) {
  const auto segs = newton_polygon(detail::kpoly_trim(f));
  require(!segs.empty(), ErrorKind::InvalidArgument, "polynomial without roots");
  require(!f.front().is_zero(), ErrorKind::InvalidArgument, "zero is a root: house undefined for 0");
  return segs.back().slope;
}

inline Rational house(const AlgebraicElem& a) {
  validate(a);
  return house_of_poly(a.minpoly);
}

/// Monic D in F_q[theta] with D alpha integral: lcm of the coefficient denominators.
inline Poly denominator_of(const AlgebraicElem& a) {
  require(!a.minpoly.empty(), ErrorKind::InvalidArgument, "empty minimal polynomial");
  Poly D = Poly::one(a.minpoly.front().field());
  for (const auto& c : a.minpoly) D = lcm(D, c.den());
  return D;
}

/// Minimal polynomial of D alpha from that of alpha: coefficients D^{m-i} c_i.
inline KPoly scaled_minpoly(const KPoly& f, const RatFunc& D) {
  const std::size_t m = f.size() - 1;
  KPoly out;
  for (std::size_t i = 0; i <= m; ++i) out.push_back(f[i] * D.pow(static_cast<long long>(m - i)));
  return out;
}

/// Weil height of a in k by the place sum, with log base q so that h(theta) = 1:
/// finite places P contribute deg(P) max(0, -v_P(a)), infinity max(0, -v_inf(a)).
inline Rational weil_height(const RatFunc& a) {
  detail::require_k(a);
  if (a.is_zero()) return Rational(0);
  Rational h(0);
  for (const auto& [P, k] : factor(a.den())) h += Rational(k * P.degree());
  h += std::max(Rational(0), -*a.v_inf());
  return h;
}

/// Height of a family in k: sum over places of the largest local contribution.
inline Rational family_height(const std::vector<RatFunc>& xs) {
  require(!xs.empty(), ErrorKind::InvalidArgument, "empty family");
  for (const auto& x : xs) detail::require_k(x);
  const GaloisField* F = xs.front().field();
  Poly L = Poly::one(F);
  for (const auto& x : xs) L = lcm(L, x.den());
  Rational h(0);
  for (const auto& [P, unused] : factor(L)) {
    (void)unused;
    long worst = 0;
    for (const auto& x : xs) {
      long v = 0;
      Poly d = x.den();
      while (!d.is_zero() && d.degree() > 0 && (d % P).is_zero()) {
        d = d / P;
        ++v;
      }
      worst = std::max(worst, v);
    }
    h += Rational(worst * P.degree());
  }
  Rational inf(0);
  for (const auto& x : xs)
    if (!x.is_zero()) inf = std::max(inf, -*x.v_inf());
  return h + inf;
}

/// Height of a single algebraic element: max deg_theta of the primitive
/// minimal polynomial divided by its degree.
inline Rational algebraic_height(const AlgebraicElem& a) {
  validate(a);
  long m = 0;
  for (const auto& c : detail::primitive_part(a.minpoly)) m = std::max(m, c.degree());
  return Rational(m, static_cast<long long>(a.degree()));
}

/// h(alpha_1..alpha_n) <= max{0, houses} + deg_theta(D) with D a common denominator.
/// Families must lie in k, or consist of one algebraic element.
inline CheckRecord check_height_inequality(const std::vector<AlgebraicElem>& family) {
  require(!family.empty(), ErrorKind::InvalidArgument, "empty family");
  for (const auto& a : family) validate(a);
  const bool all_k = std::all_of(family.begin(), family.end(), [](const AlgebraicElem& a) { return a.in_k(); });
  require(all_k || family.size() == 1, ErrorKind::InvalidArgument,
          "heights of families outside k need a common presented extension");
  Rational lhs(0);
  if (all_k) {
    std::vector<RatFunc> xs;
    for (const auto& a : family) xs.push_back(a.value_in_k());
    lhs = family_height(xs);
  } else {
    lhs = algebraic_height(family.front());
  }
  Rational hmax(0);
  Poly D = Poly::one(family.front().minpoly.front().field());
  for (const auto& a : family) {
    if (!a.minpoly.front().is_zero()) hmax = std::max(hmax, house(a));
    D = lcm(D, denominator_of(a));
  }
  const Rational rhs = hmax + Rational(D.degree());
  return {"heights.height_inequality", lhs <= rhs ? Status::Verified : Status::Failed, kExact,
          json{{"height", to_string(lhs)}, {"max_house", to_string(hmax)}, {"deg_denominator", D.degree()},
               {"bound", to_string(rhs)}}};
}

/// Elements a + b r of k(r), r^2 = c with c not a square in k (odd characteristic).
struct QuadraticElem {
  RatFunc a, b, c;

  QuadraticElem operator+(const QuadraticElem& o) const { return {a + o.a, b + o.b, c}; }
  QuadraticElem operator-(const QuadraticElem& o) const { return {a - o.a, b - o.b, c}; }
  QuadraticElem operator*(const QuadraticElem& o) const { return {a * o.a + c * b * o.b, a * o.b + b * o.a, c}; }
  QuadraticElem pow(unsigned n) const {
    QuadraticElem r{a.one(), a.zero(), c};
    for (unsigned i = 0; i < n; ++i) r = r * *this;
    return r;
  }
  bool is_zero() const { return a.is_zero() && b.is_zero(); }

  AlgebraicElem algebraic() const {
    if (b.is_zero()) return AlgebraicElem::from_k(a);
    const RatFunc two = RatFunc::from_int(a.field(), 2);
    return {{a * a - c * b * b, -(two * a), a.one()}, std::nullopt};
  }

  /// Both images a +- b r_loc, where r_loc is a local square root of c.
  std::vector<LocalFieldElem> conjugates(RatFuncEvaluator& ev, const LocalFieldElem& r_loc, long prec) const {
    LocalFieldElem x = ev.eval(a, prec), y = (ev.eval(b, prec + std::abs(r_loc.ord_u())) * r_loc).truncated(prec);
    return {(x + y).truncated(prec), (x - y).truncated(prec)};
  }
};

/// An algebraic function g with sum_i b_i(z) g^i = 0, b_i in k[z], together
/// with its expansion at z = 0.
struct AlgebraicSeries {
  std::vector<std::vector<RatFunc>> minpoly;  // minpoly[i][j]: coefficient of z^j Y^i
  ZSeries series;

  /// A polynomial in z over k, presented by Y - g(z).
  static AlgebraicSeries polynomial(const ZSeries& g) {
    require(g.exact(), ErrorKind::InvalidArgument, "polynomial input must be exact");
    const RatFunc one = g.one();
    std::vector<RatFunc> b0;
    for (long j = 0; j < g.support_end(); ++j) b0.push_back(j < g.ord() ? one.zero() : -g.coeff(j));
    if (b0.empty()) b0.push_back(one.zero());
    return {{b0, {one}}, g};
  }

  KPoly specialize(const RatFunc& x) const {
    KPoly out;
    for (const auto& bi : minpoly) {
      RatFunc acc = x.zero();
      for (std::size_t j = bi.size(); j-- > 0;) acc = acc * x + bi[j];
      out.push_back(acc);
    }
    return out;
  }
};

/// Growth of deg_theta(D_k) and house(g(alpha^{d^k})) for alpha in k, v(alpha) > 0.
/// Both are read from sum_i b_i(alpha^{d^k}) Y^i made monic (upper bounds over its
/// roots); constants are fitted on k <= k_max/2 and checked on all k <= k_max.
inline std::vector<CheckRecord> orbit_growth_check(const AlgebraicSeries& g, const RatFunc& alpha, unsigned d,
                                                   unsigned k_max, const LocalEmbedding* emb = nullptr) {
  detail::require_k(alpha);
  require(!alpha.is_zero() && *alpha.v_inf() > 0, ErrorKind::InvalidArgument, "alpha must satisfy v(alpha) > 0");
  require(d >= 2, ErrorKind::InvalidArgument, "d >= 2 required");
  std::vector<CheckRecord> out;
  std::vector<long> degs;
  std::vector<Rational> houses;
  std::vector<bool> zero_root;
  json rows = json::array();
  for (unsigned k = 0; k <= k_max; ++k) {
    const RatFunc x = alpha.pow(static_cast<long long>(ipow(d, k)));
    KPoly B = g.specialize(x);
    require(!B.back().is_zero(), ErrorKind::EvaluationPole, "leading coefficient vanishes at alpha^{d^k}");
    const RatFunc lead_inv = B.back().inverse();
    for (auto& c : B) c = c * lead_inv;
    const long dk = denominator_of(AlgebraicElem{B, std::nullopt}).degree();
    std::size_t lo = 0;
    while (lo + 1 < B.size() && B[lo].is_zero()) ++lo;
    const bool only_zero = lo + 1 == B.size();
    const Rational hk = only_zero ? Rational(0) : house_of_poly(KPoly(B.begin() + static_cast<long>(lo), B.end()));
    degs.push_back(dk);
    houses.push_back(hk);
    rows.push_back(json{{"k", k}, {"deg_denominator", dk}, {"house", to_string(hk)}});

    if (emb != nullptr) {
      RatFuncEvaluator ev(*emb);
      const LocalFieldElem xl = ev.eval(x, emb->cap);
      const LocalFieldElem val = evaluate_at_local(g.series, xl, ev, TailBound{Rational(0), Rational(0), Rational(0), 2});
      LocalFieldElem acc = LocalFieldElem::zero(emb->field, emb->e);
      LocalFieldElem pw = LocalFieldElem::one(emb->field, emb->e);
      for (const auto& c : B) {
        acc = acc + (ev.eval(c, val.prec() + 2 * std::abs(pw.ord_u()) + 8) * pw).truncated(val.prec());
        pw = (pw * val).truncated(val.prec());
      }
      out.push_back(identity_record("heights.orbit_growth_root_k" + std::to_string(k),
                                    acc.truncated(val.prec()).is_zero_on_window(), val.prec()));
    }
  }
  const unsigned k_fit = k_max / 2;
  Rational c1(0), c2(0);
  for (unsigned k = 0; k <= k_fit; ++k) {
    const Rational dk(static_cast<long long>(ipow(d, k)));
    c1 = std::max(c1, Rational(degs[k]) / dk);
    c2 = std::max(c2, houses[k] / dk);
  }
  bool ok = true;
  for (unsigned k = 0; k <= k_max; ++k) {
    const Rational dk(static_cast<long long>(ipow(d, k)));
    ok = ok && Rational(degs[k]) <= c1 * dk && houses[k] <= c2 * dk;
  }
  out.push_back({"heights.orbit_growth", ok ? Status::Evidence : Status::Failed, static_cast<long>(k_max),
                 json{{"c1", to_string(c1)}, {"c2", to_string(c2)}, {"fit_up_to", k_fit}, {"rows", rows}}});
  return out;
}

using BigRational = boost::multiprecision::cpp_rational;

struct PhilipponInput {
  Rational c1{1}, c2{1}, c3{1}, c4{1}, c5{1}, c6{1};
  long c0 = 0;  // c_0(N)
  unsigned d = 2, s = 1;
  long N = 1, T = 10;
  std::optional<long long> n_N;  // defaults to ceil(c2 N^{s+1})
  Rational c{1};                 // the constant of condition (5)
};

/// Conditions (1)-(5) for t <= T with delta_t = c3 N, sigma_t = c4 d^{t+c0} N,
/// eps_t = c6 d^{t+c0} n_N, rho_t = c5 d^{t+c0} n_N.
inline std::vector<CheckRecord> philippon_condition_check(const PhilipponInput& in) {
  using R = BigRational;
  auto big = [](const Rational& r) { return R(r.numerator()) / R(r.denominator()); };
  auto pw = [](R b, long e) {
    R r = 1;
    if (e < 0) {
      b = 1 / b;
      e = -e;
    }
    for (long i = 0; i < e; ++i) r *= b;
    return r;
  };
  auto str = [](const R& r) { return r.str(); };
  require(in.T >= 0 && in.N >= 1 && in.d >= 1 && in.c0 >= 0, ErrorKind::InvalidArgument, "invalid horizon or degree");
  const long s = static_cast<long>(in.s);
  const R Nn(in.N);
  const R nN = in.n_N ? R(*in.n_N) : [&] {
    const R v = big(in.c2) * pw(Nn, s + 1);
    const boost::multiprecision::cpp_int q = numerator(v) / denominator(v);
    return R(q * denominator(v) == numerator(v) ? q : q + 1);
  }();
  const long T = in.T;
  std::vector<R> delta, sigma, eps, rho;
  for (long t = 0; t <= T + 1; ++t) {
    const R D = pw(R(in.d), t + in.c0);
    delta.push_back(big(in.c3) * Nn);
    sigma.push_back(big(in.c4) * D * Nn);
    eps.push_back(big(in.c6) * D * nN);
    rho.push_back(big(in.c5) * D * nN);
  }
  std::vector<CheckRecord> out;
  auto rec = [&](std::string id, bool ok, json details) {
    out.push_back({std::move(id), ok ? Status::Verified : Status::Failed, T + 1, std::move(details)});
  };

  rec("heights.philippon_hypotheses",
      in.c5 >= in.c6 && nN >= big(in.c2) * pw(Nn, s + 1) && Nn >= big(in.c1) && in.d >= 2,
      json{{"c5_ge_c6", in.c5 >= in.c6}, {"n_N", str(nN)}, {"n_N_ge_c2_N^(s+1)", nN >= big(in.c2) * pw(Nn, s + 1)},
           {"N_ge_c1", Nn >= big(in.c1)}, {"d_ge_2", in.d >= 2}});

  bool seq_ok = true;
  for (long t = 0; t <= T; ++t)
    for (const auto* v : {&delta, &sigma, &eps, &rho})
      seq_ok = seq_ok && (*v)[t] > 1 && (*v)[t + 1] >= (*v)[t];
  rec("heights.philippon_sequences", seq_ok, json{{"rule", "non-decreasing, values > 1"}});

  std::optional<int> first;
  auto note = [&](int k, bool ok) {
    if (!ok && !first) first = k;
  };
  long bad = -1;
  for (long t = 0; t <= T && bad < 0; ++t)
    if (delta[t] > sigma[t]) bad = t;
  rec("heights.philippon_cond1", bad < 0, json{{"first_violation_t", bad}});
  note(1, bad < 0);

  bad = -1;
  for (long t = 0; t <= T && bad < 0; ++t)
    if (eps[t] > rho[t + 1]) bad = t;
  rec("heights.philippon_cond2", bad < 0,
      json{{"first_violation_t", bad}, {"eps_0", str(eps[0])}, {"rho_1", str(rho[1])}});
  note(2, bad < 0);

  bad = -1;
  for (long t = 0; t <= T && bad < 0; ++t)
    if (delta[t + 1] + sigma[t + 1] <= delta[t] + sigma[t]) bad = t;
  rec("heights.philippon_cond3", bad < 0,
      json{{"rule", "delta_t + sigma_t strictly increasing on the horizon"}, {"first_violation_t", bad}});
  note(3, bad < 0);

  bad = -1;
  bool strict = true;
  auto u = [&](long t) { return eps[t] / ((delta[t] + sigma[t]) * pw(delta[t], s)); };
  for (long t = 0; t < T + 1; ++t) {
    const R a = u(t), b = u(t + 1);
    if (b < a && bad < 0) bad = t;
    if (b == a) strict = false;
  }
  CheckRecord c4{"heights.philippon_cond4", bad < 0 ? Status::Verified : Status::Failed, T + 1,
                 json{{"first_violation_t", bad}, {"strict", strict}}};
  if (bad < 0 && !strict) c4.details["note"] = "non-strict: u_{t+1}/u_t = 1 somewhere on the horizon";
  out.push_back(c4);
  note(4, bad < 0);

  bad = -1;
  json lhs0;
  for (long t = 0; t <= T && bad < 0; ++t) {
    const R lhs = pw(eps[t], s + 1) / (pw(delta[t], s - 1) * (pw(eps[t + 1], s) + pw(rho[t + 1], s)));
    if (t == 0) lhs0 = str(lhs);
    if (lhs < big(in.c) * (delta[t] + sigma[t])) bad = t;
  }
  rec("heights.philippon_cond5", bad < 0, json{{"first_violation_t", bad}, {"lhs_0", lhs0}});
  note(5, bad < 0);

  rec("heights.philippon", !first.has_value(),
      json{{"first_violated_condition", first ? json(*first) : json(nullptr)}, {"horizon", T}});
  return out;
}

}  // namespace mahlerlog
