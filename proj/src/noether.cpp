#include "jetcartan/noether.hpp"

#include <cmath>
#include <functional>

namespace jc {

namespace {

void require_vertical_on_chart(const JetContext& ctx, const VectorField& xi) {
  (void)ctx;
  if (!xi.vertical()) throw ContextError("fdiv needs a vertical vector field");
  for (auto& [c, e] : xi.components())
    if (c.role != Role::Fiber)
      throw ContextError("fdiv needs a vector field on Y (fiber components only)");
}

}  // namespace

Expr fdiv(const ConstitutiveRelation& cr, const VectorField& xi) {
  const JetContext& ctx = cr.ctx();
  require_vertical_on_chart(ctx, xi);
  Expr out = Expr::zero();
  for (int mu = 0; mu < ctx.n1(); ++mu)
    for (int i = 0; i < ctx.m(); ++i) {
      Expr f = cr.F(mu, i);
      if (f.is_zero()) continue;
      out = out + f * total_derivative(ctx, mu, xi.component(ctx.fiber(i)), DerivMode::Full);
    }
  return out;
}

Expr fdiv_algebraic(const ConstitutiveRelation& cr, const VectorField& xi) {
  const JetContext& ctx = cr.ctx();
  if (!xi.p_vertical())
    throw ContextError("the algebraic admissibility form needs a P-vertical field");
  Expr out = Expr::zero();
  for (const Coordinate& z : ctx.admitted_jet1())
    out = out + xi.component(z) * cr.F(z.dirs[0], z.field);
  return out;
}

bool DeterminingSystem::all_zero() const {
  for (const auto& eq : equations)
    if (!expands_to_zero(eq.equation)) return false;
  return true;
}

namespace {

// Splits a jet-polynomial expression into jet-monomial coefficients.
DeterminingSystem split_by_jet_monomials(const JetContext& ctx, const Expr& e) {
  std::set<Coordinate, CoordLess> jets;
  for (const Coordinate& c : free_coords(e))
    if (c.role == Role::Jet) jets.insert(c);
  if (!polynomial_in(e, jets))
    throw ContextError("non-polynomial jet dependence; cannot split into a determining system");
  (void)ctx;
  Expr flat = expand(e);
  using Key = std::vector<std::pair<Coordinate, long>>;
  std::map<Key, Expr> buckets;
  auto add_term = [&](const Expr& term) {
    Key key;
    std::vector<Expr> rest;
    auto classify_factor = [&](const Expr& f) {
      const Node& n = f.node();
      if (n.kind == Kind::Coord && n.coord.role == Role::Jet) {
        key.emplace_back(n.coord, 1);
        return;
      }
      if (n.kind == Kind::Power && n.args[0].kind() == Kind::Coord &&
          n.args[0].node().coord.role == Role::Jet) {
        key.emplace_back(n.args[0].node().coord, n.expo.convert_to<long>());
        return;
      }
      rest.push_back(f);
    };
    if (term.kind() == Kind::Product)
      for (const Expr& f : term.node().args) classify_factor(f);
    else
      classify_factor(term);
    std::sort(key.begin(), key.end(), [](const auto& a, const auto& b) {
      int c = compare(a.first, b.first);
      return c != 0 ? c < 0 : a.second < b.second;
    });
    Expr coeff = Expr::prod(std::move(rest));
    auto it = buckets.find(key);
    if (it == buckets.end()) buckets.emplace(std::move(key), coeff);
    else it->second = it->second + coeff;
  };
  if (flat.kind() == Kind::Sum)
    for (const Expr& t : flat.node().args) add_term(t);
  else if (!flat.is_zero())
    add_term(flat);
  DeterminingSystem out;
  for (auto& [key, coeff] : buckets) {
    if (coeff.is_zero()) continue;
    std::string label;
    if (key.empty()) {
      label = "1";
    } else {
      for (size_t k = 0; k < key.size(); ++k) {
        if (k) label += "*";
        label += key[k].first.name;
        if (key[k].second > 1) label += "^" + std::to_string(key[k].second);
      }
    }
    out.equations.push_back({coeff, label});
  }
  return out;
}

}  // namespace

DeterminingSystem admissibility_system(const ConstitutiveRelation& cr, const VectorField& xi,
                                       AdmissibilityPath path) {
  const JetContext& ctx = cr.ctx();
  require_vertical_on_chart(ctx, xi);
  Expr condition;
  if (path == AdmissibilityPath::Full) {
    condition = fdiv(cr, xi);
  } else {
    condition = Expr::zero();
    for (const Coordinate& z : ctx.admitted_jet1())
      condition = condition + cr.F(z.dirs[0], z.field) *
                                  total_derivative(ctx, z.dirs[0],
                                                   xi.component(ctx.fiber(z.field)),
                                                   DerivMode::Full);
  }
  return split_by_jet_monomials(ctx, condition);
}

DeterminingSystem symmetry_system(const ConstitutiveRelation& cr, const VectorField& xi) {
  const JetContext& ctx = cr.ctx();
  VectorField xi1 = prolong_vector_field(xi);
  DeterminingSystem out;
  for (int i = 0; i < ctx.m(); ++i)
    for (int mu = 0; mu < ctx.n1(); ++mu) {
      Expr f = cr.F(mu, i);
      Expr eq = xi1.apply(f);
      for (int nu = 0; nu < ctx.n1(); ++nu) {
        Expr xinu = xi.component(ctx.base(nu));
        Expr ximu = xi.component(ctx.base(mu));
        eq = eq + cr.F(nu, i) * (differentiate(ximu, ctx.base(nu)) - ximu * ctx.lambdaG_d(nu));
        eq = eq + f * (differentiate(xinu, ctx.base(nu)) - xinu * ctx.lambdaG_d(nu));
        eq = eq + cr.F(nu, i) * ximu * ctx.lambdaG_d(nu);
      }
      for (int j = 0; j < ctx.m(); ++j)
        eq = eq + cr.F(mu, j) * differentiate(xi.component(ctx.fiber(j)), ctx.fiber(i));
      if (eq.is_zero()) continue;
      DeterminingSystem part = split_by_jet_monomials(ctx, eq);
      for (auto& deq : part.equations)
        out.equations.push_back({deq.equation,
                                 "F[" + ctx.base_names()[mu] + "," + ctx.field_names()[i] +
                                     "]:" + deq.monomial});
    }
  for (int k = 0; k < ctx.m(); ++k) {
    Expr eq = xi1.apply(cr.Pi(k));
    for (int mu = 0; mu < ctx.n1(); ++mu) {
      Expr ximu = xi.component(ctx.base(mu));
      eq = eq - cr.Pi(k) * (ximu * ctx.lambdaG_d(mu) - differentiate(ximu, ctx.base(mu)));
    }
    for (int j = 0; j < ctx.m(); ++j)
      eq = eq + cr.Pi(j) * differentiate(xi.component(ctx.fiber(j)), ctx.fiber(k));
    if (eq.is_zero()) continue;
    DeterminingSystem part = split_by_jet_monomials(ctx, eq);
    for (auto& deq : part.equations)
      out.equations.push_back({deq.equation, "Pi[" + ctx.field_names()[k] + "]:" + deq.monomial});
  }
  return out;
}

namespace {

bool in_contact_ideal(const JetContext& ctx, const DiffForm& w) {
  return exactly_zero(horizontal_projection(ctx, w, DerivMode::Reduced));
}

}  // namespace

SymmetryVerdict classify_symmetry(const CoveringCR& ccr, const VectorField& xi,
                                  const DiffForm* alpha) {
  const JetContext& ctx = ccr.cr.ctx();
  MixedForm theta = theta_pc(ccr);
  bool on_jet_space = false;
  for (auto& [c, e] : xi.components())
    if (c.role == Role::Jet) on_jet_space = true;

  VectorField lifted = on_jet_space ? xi : prolong_vector_field(xi);
  if (!exactly_zero(lie_derivative(lifted, theta.beta)))
    return {SymmetryClass::None, "the source form Pi_C is not preserved"};

  DiffForm lt = lie_derivative(lifted, theta.alpha);
  if (on_jet_space) {
    // Cartan: the flow must preserve the contact ideal
    for (const DiffForm& gen : contact_generators(ctx))
      if (!in_contact_ideal(ctx, lie_derivative(lifted, gen)))
        return {SymmetryClass::None, "the contact ideal is not preserved"};
    DiffForm rest = alpha ? lt - exterior_d(*alpha) : lt;
    if (in_contact_ideal(ctx, rest))
      return {SymmetryClass::Cartan, alpha ? "with the supplied alpha" : ""};
    return {SymmetryClass::None, "L Theta is not contact modulo d(alpha)"};
  }
  if (in_contact_ideal(ctx, lt)) return {SymmetryClass::Variational, ""};
  if (alpha && in_contact_ideal(ctx, lt - exterior_d(*alpha)))
    return {SymmetryClass::Noether, "with the supplied alpha"};
  return {SymmetryClass::None, alpha ? "residual not matched by d(alpha)" : "no alpha supplied"};
}

DiffForm noether_current(const CoveringCR& ccr, const VectorField& xi) {
  VectorField lifted = xi;
  bool on_jet_space = false;
  for (auto& [c, e] : xi.components())
    if (c.role == Role::Jet || c.role == Role::Momentum) on_jet_space = true;
  if (!on_jet_space) lifted = prolong_vector_field(xi);
  return interior_product(lifted, theta_pc(ccr).alpha);
}

NoetherReport noether_residual(const CoveringCR& ccr, const VectorField& xi,
                               const NumericSection& s, const GridSpec& gs,
                               const ParamValues& params) {
  const JetContext& ctx = ccr.cr.ctx();
  bool structured = !std::holds_alternative<KindGeneral>(ccr.cr.kind()) || ctx.is_ret();
  if (!structured) {
    Expr fd = fdiv(ccr.cr, xi);
    if (equivalent(fd, Expr::zero()) == Equivalence::NotEqual)
      throw ContextError(
          "Noether residual for a general CR needs a C-admissible field (FDiv = 0); got " +
          render(fd));
  }
  VectorField xi1 = xi;
  bool on_jet_space = false;
  for (auto& [c, e] : xi.components())
    if (c.role == Role::Jet) on_jet_space = true;
  if (!on_jet_space) xi1 = prolong_vector_field(xi);

  DiffForm J = interior_product(xi1, theta_pc(ccr).alpha);
  Expr rhs_density = Expr::zero();
  for (int i = 0; i < ctx.m(); ++i)
    rhs_density = rhs_density + characteristic(ctx, xi1, i) * ccr.cr.source_term(i);

  NoetherReport rep;
  if (s.is_closed_form()) {
    rep.closed_form = true;
    DiffForm pulled = pullback_section(ctx, J, s.closed_form);
    DiffForm lhs = exterior_d(pulled);
    DiffForm rhs = eta(ctx) * pullback_section(ctx, rhs_density, s.closed_form);
    DiffForm diff = lhs - rhs;
    rep.exact_zero = exactly_zero(diff);
    if (!rep.exact_zero) {
      // numeric evaluation of the closed-form residual density
      Monomial eta_mono;
      for (int mu = 0; mu < ctx.n1(); ++mu) eta_mono.d.push_back(ctx.base(mu));
      Expr density = diff.coefficient(eta_mono) / ctx.sqrt_detG();
      std::vector<long> stride(ctx.n1(), 1);
      long total = 1;
      for (int a = ctx.n1() - 2; a >= 0; --a) stride[a] = stride[a + 1] * gs.n[a + 1];
      for (int a = 0; a < ctx.n1(); ++a) total *= gs.n[a];
      for (long idx = 0; idx < total; ++idx) {
        NumPoint pt;
        long rem = idx;
        for (int a = 0; a < ctx.n1(); ++a) {
          int i0 = (int)(rem / stride[a]);
          rem %= stride[a];
          pt[ctx.base(a)] = gs.lo[a] + i0 * (gs.hi[a] - gs.lo[a]) / gs.n[a];
        }
        rep.max_deviation = std::max(rep.max_deviation, std::abs(evaluate(density, pt, params)));
      }
    }
    return rep;
  }

  // numeric path: evaluate the current components, then finite-difference the
  // divergence d(sum b^mu eta_mu) = sum (d_mu b^mu + b^mu lambda_mu) eta
  DiffForm Jh = horizontal_projection(ctx, J, DerivMode::Full);
  std::vector<Expr> b(ctx.n1(), Expr::zero());
  Monomial all;
  for (int mu = 0; mu < ctx.n1(); ++mu) all.d.push_back(ctx.base(mu));
  for (int mu = 0; mu < ctx.n1(); ++mu) {
    Monomial m;
    for (int nu = 0; nu < ctx.n1(); ++nu)
      if (nu != mu) m.d.push_back(ctx.base(nu));
    Expr c = Jh.coefficient(m);
    if (mu % 2 == 1) c = -c;
    b[mu] = c / ctx.sqrt_detG();
  }

  // grid setup mirrors verify_section
  BalanceSystem probe;
  probe.ctx = ctx;
  for (int mu = 0; mu < ctx.n1(); ++mu) probe.residuals.push_back(b[mu]);
  probe.residuals.push_back(rhs_density);
  // evaluate b^mu and rhs on the grid via the section machinery
  std::vector<long> stride(ctx.n1(), 1);
  long total = 1;
  std::vector<double> h(ctx.n1());
  for (int a = ctx.n1() - 2; a >= 0; --a) stride[a] = stride[a + 1] * gs.n[a + 1];
  for (int a = 0; a < ctx.n1(); ++a) {
    total *= gs.n[a];
    h[a] = (gs.hi[a] - gs.lo[a]) / gs.n[a];
  }
  // jets of the sampled section by finite differences
  std::map<std::pair<int, std::vector<std::int16_t>>, std::vector<double>> jets;
  std::function<const std::vector<double>&(int, std::vector<std::int16_t>)> jet_grid =
      [&](int field, std::vector<std::int16_t> dirs) -> const std::vector<double>& {
    std::sort(dirs.begin(), dirs.end());
    auto key = std::make_pair(field, dirs);
    auto it = jets.find(key);
    if (it != jets.end()) return it->second;
    if (dirs.empty()) return s.values[field];
    std::vector<std::int16_t> rest(dirs.begin(), dirs.end() - 1);
    int axis = dirs.back();
    const std::vector<double>& src = jet_grid(field, rest);
    std::vector<double> d(src.size());
    int n = gs.n[axis];
    for (long idx = 0; idx < total; ++idx) {
      int i0 = (int)((idx / stride[axis]) % n);
      auto at = [&](int shift) {
        int i = ((i0 + shift) % n + n) % n;  // periodic
        return src[idx + (long)(i - i0) * stride[axis]];
      };
      d[idx] = (at(1) - at(-1)) / (2 * h[axis]);
    }
    return jets.emplace(key, std::move(d)).first->second;
  };

  std::set<Coordinate, CoordLess> coords;
  for (const Expr& e : probe.residuals) collect_coords(e, coords);
  std::vector<std::vector<double>> bgrid(ctx.n1(), std::vector<double>(total));
  std::vector<double> rhsgrid(total);
  std::vector<std::vector<double>> lamgrid(ctx.n1(), std::vector<double>(total));
  for (long idx = 0; idx < total; ++idx) {
    NumPoint pt;
    long rem = idx;
    for (int a = 0; a < ctx.n1(); ++a) {
      int i0 = (int)(rem / stride[a]);
      rem %= stride[a];
      pt[ctx.base(a)] = gs.lo[a] + i0 * h[a];
    }
    for (const Coordinate& co : coords) {
      if (co.role == Role::Fiber) pt[co] = s.values[co.field][idx];
      else if (co.role == Role::Jet) pt[co] = jet_grid(co.field, co.dirs)[idx];
    }
    for (int mu = 0; mu < ctx.n1(); ++mu) {
      bgrid[mu][idx] = evaluate(b[mu], pt, params);
      lamgrid[mu][idx] = evaluate(ctx.lambdaG_d(mu), pt, params);
    }
    rhsgrid[idx] = evaluate(rhs_density, pt, params);
  }
  double hmax = 0;
  for (int a = 0; a < ctx.n1(); ++a) hmax = std::max(hmax, h[a]);
  for (long idx = 0; idx < total; ++idx) {
    double div = 0;
    for (int mu = 0; mu < ctx.n1(); ++mu) {
      int n = gs.n[mu], i0 = (int)((idx / stride[mu]) % n);
      auto at = [&](int shift) {
        int i = ((i0 + shift) % n + n) % n;
        return bgrid[mu][idx + (long)(i - i0) * stride[mu]];
      };
      div += (at(1) - at(-1)) / (2 * h[mu]) + bgrid[mu][idx] * lamgrid[mu][idx];
    }
    rep.max_deviation = std::max(rep.max_deviation, std::abs(div - rhsgrid[idx]));
  }
  rep.stencil_bound = hmax * hmax;
  return rep;
}

EnergyMomentum energy_momentum(const ConstitutiveRelation& cr, const Connection& nu) {
  const JetContext& ctx = cr.ctx();
  nu.validate();
  EnergyMomentum out;
  int n1 = ctx.n1();
  out.T.assign(n1, std::vector<Expr>(n1, Expr::zero()));
  Expr trace = Expr::zero();
  for (int sigma = 0; sigma < n1; ++sigma)
    for (int i = 0; i < ctx.m(); ++i)
      trace = trace + cr.F(sigma, i) * Expr::coord(ctx.jet(i, {(std::int16_t)sigma}));
  for (int v = 0; v < n1; ++v)
    for (int mu = 0; mu < n1; ++mu) {
      Expr t = Expr::zero();
      for (int i = 0; i < ctx.m(); ++i) {
        t = t + cr.F(v, i) * nu.at(i, mu);
        t = t + cr.F(v, i) * Expr::coord(ctx.jet(i, {(std::int16_t)mu}));
      }
      if (v == mu) t = t - trace;
      out.T[v][mu] = expand(t);
    }
  out.condition.assign(n1, std::vector<Expr>(1, Expr::zero()));
  out.condition_holds.assign(n1, true);
  for (int mu = 0; mu < n1; ++mu) {
    Expr cond = Expr::zero();
    for (int v = 0; v < n1; ++v)
      for (int i = 0; i < ctx.m(); ++i)
        cond = cond + cr.F(v, i) * total_derivative(ctx, v, nu.at(i, mu), DerivMode::Full);
    out.condition[mu][0] = cond;
    out.condition_holds[mu] = expands_to_zero(cond);
  }
  return out;
}

MixedForm secondary_balance_law(const ConstitutiveRelation& cr, const VectorField& xi) {
  const JetContext& ctx = cr.ctx();
  Expr fd = fdiv(cr, xi);
  if (equivalent(fd, Expr::zero()) == Equivalence::NotEqual)
    throw ContextError("secondary balance law needs an admissible field: FDiv = " + render(fd));
  DiffForm flux;
  for (int mu = 0; mu < ctx.n1(); ++mu) {
    Expr f = Expr::zero();
    for (int i = 0; i < ctx.m(); ++i)
      f = f + xi.component(ctx.fiber(i)) * cr.F(mu, i);
    flux = flux + eta_mu(ctx, mu) * f;
  }
  Expr src = Expr::zero();
  for (int i = 0; i < ctx.m(); ++i)
    src = src + xi.component(ctx.fiber(i)) * cr.source_term(i);
  return MixedForm{flux, eta(ctx) * src};
}

}  // namespace jc
