#include "jetcartan/exterior.hpp"

namespace jc {

DiffForm eta(const JetContext& ctx) {
  Monomial m;
  for (int mu = 0; mu < ctx.n1(); ++mu) m.d.push_back(ctx.base(mu));
  return DiffForm::term(std::move(m), ctx.sqrt_detG());
}

DiffForm eta_form(const JetContext& ctx, const std::vector<int>& indices, bool* repeated_flag) {
  if (repeated_flag) *repeated_flag = false;
  if (indices.size() > 2) throw ContextError("eta_form takes at most two indices");
  if (indices.size() == 2 && indices[0] == indices[1]) {
    if (repeated_flag) *repeated_flag = true;
    return DiffForm::zero();
  }
  DiffForm f = eta(ctx);
  for (int mu : indices) {
    VectorField e(ctx);
    e.set(ctx.base(mu), Expr::one());
    f = interior_product(e, f);
  }
  return f;
}

DiffForm eta_mu(const JetContext& ctx, int mu) { return eta_form(ctx, {mu}); }

DiffForm exterior_d(const DiffForm& w) {
  DiffForm out;
  for (auto& [m, coeff] : w.terms()) {
    for (const Coordinate& c : free_coords(coeff)) {
      Expr dc = differentiate(coeff, c);
      if (dc.is_zero()) continue;
      auto wm = wedge_mono(Monomial{{c}}, m);
      if (!wm) continue;
      out.add(wm->first, wm->second < 0 ? -dc : dc);
    }
  }
  return out;
}

DiffForm interior_product(const VectorField& xi, const DiffForm& w) {
  DiffForm out;
  for (auto& [m, coeff] : w.terms()) {
    for (size_t k = 0; k < m.d.size(); ++k) {
      Expr comp = xi.component(m.d[k]);
      if (comp.is_zero()) continue;
      Monomial rest;
      for (size_t j = 0; j < m.d.size(); ++j)
        if (j != k) rest.d.push_back(m.d[j]);
      Expr c = coeff * comp;
      out.add(rest, (k % 2 == 0) ? c : -c);
    }
  }
  return out;
}

DiffForm lie_derivative(const VectorField& xi, const DiffForm& w) {
  return exterior_d(interior_product(xi, w)) + interior_product(xi, exterior_d(w));
}

Expr total_derivative(const JetContext& ctx, int mu, const Expr& e, DerivMode mode) {
  std::vector<Expr> terms;
  terms.push_back(differentiate(e, ctx.base(mu)));
  for (int i = 0; i < ctx.m(); ++i) {
    if (mode == DerivMode::Reduced && !ctx.admitted(mu, i)) continue;
    Expr df = differentiate(e, ctx.fiber(i));
    if (df.is_zero()) continue;
    terms.push_back(Expr::coord(ctx.jet(i, {(std::int16_t)mu})) * df);
  }
  for (const Coordinate& c : free_coords(e)) {
    if (c.role != Role::Jet) continue;
    Expr df = differentiate(e, c);
    if (df.is_zero()) continue;
    std::vector<std::int16_t> dirs = c.dirs;
    dirs.push_back((std::int16_t)mu);
    terms.push_back(Expr::coord(ctx.jet(c.field, std::move(dirs))) * df);
  }
  return Expr::sum(std::move(terms));
}

namespace {

// h0 image of a single coordinate differential, as a 1-form in the dx's.
DiffForm h0_differential(const JetContext& ctx, const Coordinate& c, DerivMode mode) {
  switch (c.role) {
    case Role::Base:
      return DiffForm::differential(c);
    case Role::Fiber: {
      DiffForm out;
      for (int mu = 0; mu < ctx.n1(); ++mu) {
        if (mode == DerivMode::Reduced && !ctx.admitted(mu, c.field)) continue;
        out.add(Monomial{{ctx.base(mu)}},
                Expr::coord(ctx.jet(c.field, {(std::int16_t)mu})));
      }
      return out;
    }
    case Role::Jet: {
      DiffForm out;
      for (int mu = 0; mu < ctx.n1(); ++mu) {
        std::vector<std::int16_t> dirs = c.dirs;
        dirs.push_back((std::int16_t)mu);
        out.add(Monomial{{ctx.base(mu)}}, Expr::coord(ctx.jet(c.field, std::move(dirs))));
      }
      return out;
    }
    default:
      throw ContextError("horizontal projection is defined on jet-bundle forms only");
  }
}

}  // namespace

DiffForm horizontal_projection(const JetContext& ctx, const DiffForm& w, DerivMode mode) {
  DiffForm out;
  for (auto& [m, coeff] : w.terms()) {
    DiffForm piece = DiffForm::scalar(coeff);
    for (const Coordinate& c : m.d) {
      piece = wedge(piece, h0_differential(ctx, c, mode));
      if (piece.is_zero()) break;
    }
    out = out + piece;
  }
  return out;
}

DiffForm reduced_horizontal_d(const JetContext& ctx, const DiffForm& w) {
  DiffForm out;
  for (auto& [m, coeff] : w.terms()) {
    for (int mu = 0; mu < ctx.n1(); ++mu) {
      Expr dmu = total_derivative(ctx, mu, coeff, DerivMode::Full);
      if (dmu.is_zero()) continue;
      auto wm = wedge_mono(Monomial{{ctx.base(mu)}}, m);
      if (!wm) continue;
      out.add(wm->first, wm->second < 0 ? -dmu : dmu);
    }
  }
  return out;
}

MixedForm iglesias_d(const MixedForm& f) {
  return MixedForm{-exterior_d(f.alpha) + f.beta, exterior_d(f.beta)};
}

MixedForm iglesias_d_hat(const JetContext& ctx, const MixedForm& f) {
  return MixedForm{-reduced_horizontal_d(ctx, f.alpha) + f.beta,
                   reduced_horizontal_d(ctx, f.beta)};
}

}  // namespace jc
