#include "jetcartan/transform.hpp"

#include <functional>

namespace jc {

namespace {

void check_args(const JetContext& ctx, const std::vector<Expr>& v, bool fiber_ok,
                const char* what) {
  if ((int)v.size() != (fiber_ok ? ctx.m() : ctx.n1()))
    throw ContextError(std::string(what) + ": wrong component count");
  for (const Expr& e : v)
    for (const Coordinate& c : free_coords(e)) {
      if (c.role == Role::Base) continue;
      if (fiber_ok && c.role == Role::Fiber) continue;
      throw ContextError(std::string(what) + " may depend on " +
                         (fiber_ok ? "(x, y)" : "x") + " only");
    }
}

std::vector<std::vector<Expr>> invert_sym(const std::vector<std::vector<Expr>>& a) {
  size_t n = a.size();
  std::function<Expr(const std::vector<std::vector<Expr>>&)> det =
      [&](const std::vector<std::vector<Expr>>& g) -> Expr {
    if (g.size() == 1) return g[0][0];
    Expr d = Expr::zero();
    for (size_t j = 0; j < g.size(); ++j) {
      std::vector<std::vector<Expr>> sub;
      for (size_t r = 1; r < g.size(); ++r) {
        std::vector<Expr> row;
        for (size_t c = 0; c < g.size(); ++c)
          if (c != j) row.push_back(g[r][c]);
        sub.push_back(std::move(row));
      }
      Expr term = g[0][j] * det(sub);
      d = j % 2 == 0 ? d + term : d - term;
    }
    return d;
  };
  Expr D = det(a);
  if (equivalent(D, Expr::zero()) != Equivalence::NotEqual)
    throw ContextError("non-invertible Jacobian");
  std::vector<std::vector<Expr>> inv(n, std::vector<Expr>(n));
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < n; ++c) {
      std::vector<std::vector<Expr>> m;
      for (size_t rr = 0; rr < n; ++rr) {
        if (rr == c) continue;
        std::vector<Expr> row;
        for (size_t cc = 0; cc < n; ++cc)
          if (cc != r) row.push_back(a[rr][cc]);
        m.push_back(std::move(row));
      }
      Expr cof = m.empty() ? Expr::one() : det(m);
      if ((r + c) % 2 == 1) cof = -cof;
      inv[r][c] = cof / D;
    }
  return inv;
}

}  // namespace

Automorphism::Automorphism(JetContext ctx, std::vector<Expr> base_map,
                           std::vector<Expr> fiber_map, std::vector<Expr> base_inv,
                           std::vector<Expr> fiber_inv)
    : ctx_(std::move(ctx)),
      base_(std::move(base_map)),
      fiber_(std::move(fiber_map)),
      base_inv_(std::move(base_inv)),
      fiber_inv_(std::move(fiber_inv)) {
  check_args(ctx_, base_, false, "base map");
  check_args(ctx_, fiber_, true, "fiber map");
  check_args(ctx_, base_inv_, false, "base inverse");
  check_args(ctx_, fiber_inv_, true, "fiber inverse");
  // composition to the identity, both ways
  auto compose_check = [&](const std::vector<Expr>& fb, const std::vector<Expr>& ff,
                           const std::vector<Expr>& gb, const std::vector<Expr>& gf) {
    Bindings inner;
    for (int mu = 0; mu < ctx_.n1(); ++mu) inner[ctx_.base(mu)] = gb[mu];
    for (int i = 0; i < ctx_.m(); ++i) inner[ctx_.fiber(i)] = gf[i];
    for (int mu = 0; mu < ctx_.n1(); ++mu)
      if (!expands_to_zero(substitute(fb[mu], inner) - Expr::coord(ctx_.base(mu))))
        throw ContextError("automorphism inverse does not compose to the identity (base)");
    for (int i = 0; i < ctx_.m(); ++i)
      if (!expands_to_zero(substitute(ff[i], inner) - Expr::coord(ctx_.fiber(i))))
        throw ContextError("automorphism inverse does not compose to the identity (fiber)");
  };
  compose_check(base_, fiber_, base_inv_, fiber_inv_);
  compose_check(base_inv_, fiber_inv_, base_, fiber_);
  std::vector<std::vector<Expr>> J(ctx_.n1(), std::vector<Expr>(ctx_.n1()));
  for (int mu = 0; mu < ctx_.n1(); ++mu)
    for (int nu = 0; nu < ctx_.n1(); ++nu)
      J[mu][nu] = differentiate(base_[mu], ctx_.base(nu));
  jac_inv_ = invert_sym(J);
  std::vector<std::vector<Expr>> Jf(ctx_.m(), std::vector<Expr>(ctx_.m()));
  for (int i = 0; i < ctx_.m(); ++i)
    for (int j = 0; j < ctx_.m(); ++j) Jf[i][j] = differentiate(fiber_[i], ctx_.fiber(j));
  invert_sym(Jf);  // fiber map must be invertible at generic points too
  check_structure();
}

Automorphism Automorphism::identity(const JetContext& ctx) {
  std::vector<Expr> b, f;
  for (int mu = 0; mu < ctx.n1(); ++mu) b.push_back(Expr::coord(ctx.base(mu)));
  for (int i = 0; i < ctx.m(); ++i) f.push_back(Expr::coord(ctx.fiber(i)));
  return Automorphism(ctx, b, f, b, f);
}

Automorphism Automorphism::inverse() const {
  return Automorphism(ctx_, base_inv_, fiber_inv_, base_, fiber_);
}

Expr Automorphism::det_jacobian_base() const {
  std::function<Expr(const std::vector<std::vector<Expr>>&)> det =
      [&](const std::vector<std::vector<Expr>>& g) -> Expr {
    if (g.size() == 1) return g[0][0];
    Expr d = Expr::zero();
    for (size_t j = 0; j < g.size(); ++j) {
      std::vector<std::vector<Expr>> sub;
      for (size_t r = 1; r < g.size(); ++r) {
        std::vector<Expr> row;
        for (size_t c = 0; c < g.size(); ++c)
          if (c != j) row.push_back(g[r][c]);
        sub.push_back(std::move(row));
      }
      Expr term = g[0][j] * det(sub);
      d = j % 2 == 0 ? d + term : d - term;
    }
    return d;
  };
  std::vector<std::vector<Expr>> J(ctx_.n1(), std::vector<Expr>(ctx_.n1()));
  for (int mu = 0; mu < ctx_.n1(); ++mu)
    for (int nu = 0; nu < ctx_.n1(); ++nu)
      J[mu][nu] = differentiate(base_[mu], ctx_.base(nu));
  Expr d = det(J);
  if (ctx_.metric_euclidean()) return d;
  // the Jacobian is measured against the metric volume, not the chart volume
  Bindings to_image;
  for (int mu = 0; mu < ctx_.n1(); ++mu) to_image[ctx_.base(mu)] = base_[mu];
  return substitute(ctx_.sqrt_detG(), to_image) * d / ctx_.sqrt_detG();
}

Expr Automorphism::jac_base(int mu, int nu) const {
  return differentiate(base_[mu], ctx_.base(nu));
}
Expr Automorphism::jac_base_inv(int mu, int nu) const { return jac_inv_[mu][nu]; }
Expr Automorphism::jac_fiber(int i, int j) const {
  return differentiate(fiber_[i], ctx_.fiber(j));
}

Bindings Automorphism::prolonged_bindings() const {
  Bindings b;
  for (int mu = 0; mu < ctx_.n1(); ++mu) b[ctx_.base(mu)] = base_[mu];
  for (int i = 0; i < ctx_.m(); ++i) b[ctx_.fiber(i)] = fiber_[i];
  for (const Coordinate& z : ctx_.admitted_jet1()) {
    int i = z.field, mu = z.dirs[0];
    Expr sum = Expr::zero();
    for (int lam = 0; lam < ctx_.n1(); ++lam) {
      for (int j = 0; j < ctx_.m(); ++j) {
        Expr coeff = jac_fiber(i, j) * jac_inv_[lam][mu];
        if (coeff.is_zero()) continue;
        if (!ctx_.admitted(lam, j)) {
          if (!expands_to_zero(coeff))
            throw ContextError("automorphism does not preserve the partial jet structure: "
                               "transformed " + z.name + " needs the jet (" +
                               ctx_.base_names()[lam] + "," + ctx_.field_names()[j] + ")");
          continue;
        }
        sum = sum + coeff * Expr::coord(ctx_.jet1(lam, j));
      }
      sum = sum + differentiate(fiber_[i], ctx_.base(lam)) * jac_inv_[lam][mu];
    }
    b[z] = sum;
  }
  return b;
}

void Automorphism::check_structure() const {
  // the jet-map construction itself verifies slotwise preservation
  prolonged_bindings();
}

CoveringCR transform_cr(const CoveringCR& ccr, const Automorphism& phi) {
  const JetContext& ctx = ccr.cr.ctx();
  const Automorphism& psi = phi;  // the components compose along the lift of phi
  Bindings through = psi.prolonged_bindings();
  Expr det = psi.det_jacobian_base();

  std::map<std::pair<int, int>, Expr> newF;
  for (int mu = 0; mu < ctx.n1(); ++mu)
    for (int i = 0; i < ctx.m(); ++i) {
      Expr acc = Expr::zero();
      for (int nu = 0; nu < ctx.n1(); ++nu) {
        Expr jinv = psi.jac_base_inv(mu, nu);
        if (jinv.is_zero()) continue;
        for (int j = 0; j < ctx.m(); ++j) {
          Expr f = ccr.cr.F(nu, j);
          if (f.is_zero()) continue;
          acc = acc + jinv * substitute(f, through) *
                          differentiate(psi.fiber_map()[j], ctx.fiber(i));
        }
      }
      acc = det * acc;
      if (!acc.is_zero()) newF[{mu, i}] = acc;
    }

  std::vector<Expr> newPi;
  for (int i = 0; i < ctx.m(); ++i) {
    Expr acc = Expr::zero();
    for (int j = 0; j < ctx.m(); ++j)
      acc = acc + substitute(ccr.cr.Pi(j), through) *
                      differentiate(psi.fiber_map()[j], ctx.fiber(i));
    newPi.push_back(det * acc);
  }

  Expr newp = substitute(ccr.p, through);
  for (int nu = 0; nu < ctx.n1(); ++nu)
    for (int mu = 0; mu < ctx.n1(); ++mu) {
      Expr jinv = psi.jac_base_inv(nu, mu);
      if (jinv.is_zero()) continue;
      for (int j = 0; j < ctx.m(); ++j) {
        Expr f = ccr.cr.F(mu, j);
        if (f.is_zero()) continue;
        newp = newp + substitute(f, through) *
                          differentiate(psi.fiber_map()[j], ctx.base(nu)) * jinv;
      }
    }
  newp = det * newp;

  ConstitutiveRelation out = ConstitutiveRelation::general(ctx, std::move(newF), std::move(newPi));
  if (ccr.cr.source_negated()) out = out.with_negated_source();
  return CoveringCR{out, newp};
}

MixedForm pullback_mixed(const MixedForm& f, const Automorphism& phi) {
  Bindings through = phi.prolonged_bindings();
  auto pull = [&](const DiffForm& w) {
    DiffForm out;
    for (auto& [m, coeff] : w.terms()) {
      DiffForm piece = DiffForm::scalar(substitute(coeff, through));
      for (const Coordinate& c : m.d) {
        // d(image of c) as a form in the source chart
        Expr image = through.count(c) ? through.at(c) : Expr::coord(c);
        DiffForm dc;
        for (const Coordinate& v : free_coords(image))
          dc.add(Monomial{{v}}, differentiate(image, v));
        piece = wedge(piece, dc);
        if (piece.is_zero()) break;
      }
      out = out + piece;
    }
    return out;
  };
  return MixedForm{pull(f.alpha), pull(f.beta)};
}

}  // namespace jc
