#pragma once

#include "mahlerlog/ffcore/poly.hpp"

#include <map>
#include <random>
#include <utility>
#include <vector>

namespace mahlerlog {

namespace detail {

// f = g(x^p) -> g^{1/p}
inline Poly pth_root(const Poly& f) {
  const GaloisField* F = f.field();
  const std::size_t p = F->p();
  std::vector<GaloisField::Code> r(f.codes().size() / p + 1, 0);
  for (std::size_t i = 0; i < f.codes().size(); i += p) r[i / p] = F->frobenius_p(f.codes()[i], F->degree() - 1);
  return Poly(F, std::move(r));
}

inline Poly random_poly(const GaloisField* F, long deg, std::mt19937_64& rng) {
  std::vector<GaloisField::Code> c(static_cast<std::size_t>(deg) + 1);
  std::uniform_int_distribution<GaloisField::Code> dist(0, static_cast<GaloisField::Code>(F->order() - 1));
  for (auto& x : c) x = dist(rng);
  return Poly(F, std::move(c));
}

// Product of the distinct-degree factors of degree i, split into irreducibles.
inline void equal_degree_split(const Poly& f, long i, std::mt19937_64& rng, std::vector<Poly>& out) {
  if (f.degree() <= i) {
    out.push_back(f.monic());
    return;
  }
  const GaloisField* F = f.field();
  const unsigned long long Q = F->order();
  for (;;) {
    Poly a = random_poly(F, f.degree() - 1, rng);
    if (a.degree() < 1) continue;
    Poly b;
    if (F->p() == 2) {
      // absolute trace to F_2 over F_{Q^i}
      const long steps = static_cast<long>(F->degree()) * i;
      Poly t = a % f, acc = t;
      for (long k = 1; k < steps; ++k) {
        t = (t * t) % f;
        acc = acc + t;
      }
      b = acc;
    } else {
      Poly t = a % f, acc = t;
      for (long k = 1; k < i; ++k) {
        t = powmod(t, Q, f);
        acc = (acc * t) % f;
      }
      b = powmod(acc, (Q - 1) / 2, f) - Poly::one(F);
    }
    Poly g = gcd(b, f);
    if (g.degree() > 0 && g.degree() < f.degree()) {
      equal_degree_split(g, i, rng, out);
      equal_degree_split(f / g, i, rng, out);
      return;
    }
  }
}

// Squarefree monic f: irreducible factors.
inline void factor_squarefree(const Poly& f, std::vector<Poly>& out) {
  if (f.degree() <= 0) return;
  if (f.degree() == 1) {
    out.push_back(f.monic());
    return;
  }
  const GaloisField* F = f.field();
  std::mt19937_64 rng(0x5eedULL + static_cast<unsigned long long>(f.degree()));
  Poly rest = f.monic();
  Poly xq = Poly::x(F);
  for (long i = 1; 2 * i <= rest.degree(); ++i) {
    xq = powmod(xq, F->order(), rest);
    Poly g = gcd(xq - Poly::x(F), rest);
    if (g.degree() > 0) {
      equal_degree_split(g, i, rng, out);
      rest = rest / g;
      xq = xq % rest;
    }
  }
  if (rest.degree() > 0) out.push_back(rest.monic());
}

}  // namespace detail

/// Squarefree decomposition: pairs (g, k) with f = lead * prod g^k, g monic squarefree.
inline std::vector<std::pair<Poly, int>> squarefree_decomposition(const Poly& f) {
  std::vector<std::pair<Poly, int>> out;
  if (f.degree() <= 0) return out;
  const std::size_t p = f.field()->p();
  Poly a = f.monic();
  Poly c = gcd(a, a.derivative());
  Poly w = a / c;
  int i = 1;
  while (w.degree() > 0) {
    Poly y = gcd(w, c);
    Poly z = w / y;
    if (z.degree() > 0) out.emplace_back(z, i);
    ++i;
    w = y;
    c = c / y;
  }
  if (c.degree() > 0) {
    for (auto& [g, k] : squarefree_decomposition(detail::pth_root(c))) out.emplace_back(g, k * static_cast<int>(p));
  }
  return out;
}

/// Complete factorization into monic irreducibles with multiplicities,
/// sorted by (degree, coefficients).
inline std::vector<std::pair<Poly, int>> factor(const Poly& f) {
  std::map<Poly, int> acc;
  for (auto& [g, k] : squarefree_decomposition(f)) {
    std::vector<Poly> irr;
    detail::factor_squarefree(g, irr);
    for (auto& h : irr) acc[h] += k;
  }
  return {acc.begin(), acc.end()};
}

inline bool is_irreducible(const Poly& f) {
  if (f.degree() <= 0) return false;
  auto fs = factor(f);
  return fs.size() == 1 && fs[0].second == 1;
}

/// Roots of f in the coefficient field.
inline std::vector<FieldElem> roots_in_field(const Poly& f) {
  std::vector<FieldElem> r;
  for (auto& [g, k] : factor(f))
    if (g.degree() == 1) r.push_back(-g.coeff(0));
  return r;
}

}  // namespace mahlerlog
