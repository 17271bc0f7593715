#pragma once

#include "mahlerlog/interp.hpp"

namespace mahlerlog {

/// q = 3, theta = -u^{-2}, tilde_theta = u^{-1} (so tilde_theta^2 = -theta), e = 2,
/// over F_{3^d}.
inline CarlitzContext canonical_context(unsigned d = 1, long cap = 400) {
  const GaloisField* F = GaloisField::make(3, 1, d).get();
  LocalEmbedding emb;
  emb.field = F;
  emb.e = 2;
  emb.h = 0;
  emb.vartheta = LocalFieldElem::monomial(FieldElem::from_int(*F, -1), -2, 2);
  emb.cap = cap;
  return make_carlitz_context(emb, LocalFieldElem::monomial(FieldElem(F, 1), -1, 2));
}

/// Canonical instance with one target u_1 = 1/theta (or g/theta with g a
/// generator of F_{3^d} when d > 1).
inline Instance canonical_instance(long prec_z = 200, long cap = 400, unsigned d = 1, unsigned s = 1,
                                   std::optional<RatFunc> beta = std::nullopt) {
  CarlitzContext ctx = canonical_context(d, cap);
  const GaloisField* F = ctx.field();
  FieldElem g = d == 1 ? FieldElem(F, 1) : FieldElem(F, F->generator());
  LocalFieldElem u1 = ctx.theta_image().inverse(cap) * g;
  return make_instance(ctx, {u1}, beta.value_or(RatFunc::one(F)), s, prec_z);
}

/// Ramified variant at level h = 1: vartheta = -u^{-2}, theta = vartheta^3 = -u^{-6},
/// tilde_theta = u^{-3}, e = 6, beta = vartheta.
inline Instance sextic_instance(long prec_z = 200, long cap = 400, unsigned s = 1) {
  const GaloisField* F = GaloisField::make(3, 1, 1).get();
  LocalEmbedding emb;
  emb.field = F;
  emb.e = 6;
  emb.h = 1;
  emb.vartheta = LocalFieldElem::monomial(FieldElem::from_int(*F, -1), -2, 6);
  emb.cap = cap;
  CarlitzContext ctx = make_carlitz_context(emb, LocalFieldElem::monomial(FieldElem(F, 1), -3, 6));
  LocalFieldElem u1 = ctx.theta_image().inverse(cap);
  return make_instance(ctx, {u1}, RatFunc::vartheta(F, 1), s, prec_z);
}

}  // namespace mahlerlog
