#include "jetcartan/contact.hpp"

namespace jc {

std::vector<DiffForm> contact_generators(const JetContext& ctx) {
  std::vector<DiffForm> out;
  for (int i = 0; i < ctx.m(); ++i) {
    DiffForm w = DiffForm::differential(ctx.fiber(i));
    for (int mu = 0; mu < ctx.n1(); ++mu)
      if (ctx.admitted(mu, i))
        w.add(Monomial{{ctx.base(mu)}}, -Expr::coord(ctx.jet1(mu, i)));
    out.push_back(std::move(w));
  }
  for (int i = 0; i < ctx.m(); ++i)
    for (int sigma = 0; sigma < ctx.n1(); ++sigma) {
      if (!ctx.admitted(sigma, i)) continue;
      DiffForm w = DiffForm::differential(ctx.jet1(sigma, i));
      for (int mu = 0; mu < ctx.n1(); ++mu)
        w.add(Monomial{{ctx.base(mu)}},
              -Expr::coord(ctx.jet(i, {(std::int16_t)sigma, (std::int16_t)mu})));
      out.push_back(std::move(w));
    }
  return out;
}

Expr characteristic(const JetContext& ctx, const VectorField& xi, int i) {
  Expr out = xi.component(ctx.fiber(i));
  for (int mu = 0; mu < ctx.n1(); ++mu)
    if (ctx.admitted(mu, i))
      out = out - Expr::coord(ctx.jet1(mu, i)) * xi.component(ctx.base(mu));
  return out;
}

MixedForm vertical_endomorphism(const JetContext& ctx, const DiffForm& lambda) {
  if (!ctx.is_full())
    throw ContextError("vertical endomorphism requires the full 1-jet context");
  if (auto deg = lambda.degree(); !deg || (*deg != 1 && !lambda.is_zero()))
    throw ContextError("vertical endomorphism acts on 1-forms");
  DiffForm out;
  for (int i = 0; i < ctx.m(); ++i)
    for (int mu = 0; mu < ctx.n1(); ++mu) {
      Expr f = lambda.coefficient(Monomial{{ctx.jet1(mu, i)}});
      if (f.is_zero()) continue;
      out = out + eta(ctx) * (-(Expr::coord(ctx.jet1(mu, i)) * f));
      out = out + wedge(DiffForm::differential(ctx.fiber(i)), eta_mu(ctx, mu)) * f;
    }
  return MixedForm{out, DiffForm::zero()};
}

namespace {

Expr section_derivative(const JetContext& ctx, const std::map<int, Expr>& s,
                        int field, const std::vector<std::int16_t>& dirs) {
  auto it = s.find(field);
  if (it == s.end())
    throw ContextError("section does not define field '" + ctx.field_names()[field] + "'");
  Expr e = it->second;
  for (std::int16_t mu : dirs) e = differentiate(e, ctx.base(mu));
  return e;
}

}  // namespace

Expr pullback_section(const JetContext& ctx, const Expr& e, const std::map<int, Expr>& s) {
  Bindings b;
  for (const Coordinate& c : free_coords(e)) {
    if (c.role == Role::Fiber) b[c] = section_derivative(ctx, s, c.field, {});
    else if (c.role == Role::Jet) b[c] = section_derivative(ctx, s, c.field, c.dirs);
  }
  return substitute(e, b);
}

DiffForm pullback_section(const JetContext& ctx, const DiffForm& w,
                          const std::map<int, Expr>& s) {
  for (auto& [i, e] : s)
    for (const Coordinate& c : free_coords(e))
      if (c.role != Role::Base)
        throw ContextError("section components must depend on base coordinates only");
  DiffForm out;
  for (auto& [m, coeff] : w.terms()) {
    DiffForm piece = DiffForm::scalar(pullback_section(ctx, coeff, s));
    for (const Coordinate& c : m.d) {
      DiffForm dc;
      if (c.role == Role::Base) {
        dc = DiffForm::differential(c);
      } else if (c.role == Role::Fiber || c.role == Role::Jet) {
        std::vector<std::int16_t> dirs = c.role == Role::Jet ? c.dirs : std::vector<std::int16_t>{};
        for (int mu = 0; mu < ctx.n1(); ++mu) {
          std::vector<std::int16_t> d2 = dirs;
          d2.push_back((std::int16_t)mu);
          dc.add(Monomial{{ctx.base(mu)}}, section_derivative(ctx, s, c.field, d2));
        }
      } else {
        throw ContextError("cannot pull back a non-jet differential through a section");
      }
      piece = wedge(piece, dc);
      if (piece.is_zero()) break;
    }
    out = out + piece;
  }
  return out;
}

}  // namespace jc
