#include "jetcartan/constitutive.hpp"

#include <array>

namespace jc {

namespace {

void check_on_chart(const JetContext& ctx, const Expr& e, const char* what) {
  for (const Coordinate& c : free_coords(e)) {
    bool ok = c.role == Role::Base || c.role == Role::Fiber;
    if (c.role == Role::Jet && c.order() == 1 && ctx.admitted(c.dirs[0], c.field)) ok = true;
    if (!ok)
      throw ContextError(std::string(what) + " depends on '" + c.name +
                         "', which is not a coordinate of this constitutive domain");
  }
}

}  // namespace

void ConstitutiveRelation::validate() const {
  if ((int)Pi_.size() != ctx_.m())
    throw ContextError("constitutive relation needs one source per field");
  for (auto& [key, e] : F_) {
    if (key.first < 0 || key.first >= ctx_.n1() || key.second < 0 || key.second >= ctx_.m())
      throw ContextError("flux component indexed outside the chart");
    check_on_chart(ctx_, e, "flux component");
  }
  for (const Expr& e : Pi_) check_on_chart(ctx_, e, "source component");
  if (std::holds_alternative<KindRet>(kind_) || ctx_.is_ret()) {
    auto no_jets = [&](const Expr& e) {
      for (const Coordinate& c : free_coords(e))
        if (c.role == Role::Jet) throw ContextError("RET components must be jet-free");
    };
    for (auto& [key, e] : F_) no_jets(e);
    for (const Expr& e : Pi_) no_jets(e);
  }
}

ConstitutiveRelation ConstitutiveRelation::general(JetContext ctx,
                                                   std::map<std::pair<int, int>, Expr> flux,
                                                   std::vector<Expr> sources) {
  ConstitutiveRelation cr;
  cr.ctx_ = std::move(ctx);
  cr.kind_ = KindGeneral{};
  cr.F_ = std::move(flux);
  cr.Pi_ = std::move(sources);
  cr.validate();
  return cr;
}

ConstitutiveRelation ConstitutiveRelation::lagrangian(JetContext ctx, Expr L) {
  ConstitutiveRelation cr;
  cr.ctx_ = ctx;
  check_on_chart(ctx, L, "Lagrangian");
  for (const Coordinate& z : ctx.admitted_jet1())
    cr.F_[{z.dirs[0], z.field}] = differentiate(L, z);
  for (int i = 0; i < ctx.m(); ++i) cr.Pi_.push_back(differentiate(L, ctx.fiber(i)));
  cr.kind_ = KindLagrangian{std::move(L)};
  cr.validate();
  return cr;
}

ConstitutiveRelation ConstitutiveRelation::semi_lagrangian(JetContext ctx, Expr L,
                                                           std::vector<Expr> Q) {
  ConstitutiveRelation cr;
  cr.ctx_ = ctx;
  check_on_chart(ctx, L, "Lagrangian");
  if ((int)Q.size() != ctx.m())
    throw ContextError("semi-Lagrangian CR needs one source Q_i per field");
  for (const Coordinate& z : ctx.admitted_jet1())
    cr.F_[{z.dirs[0], z.field}] = differentiate(L, z);
  cr.Pi_ = Q;
  cr.kind_ = KindSemiLagrangian{std::move(L), std::move(Q)};
  cr.validate();
  return cr;
}

ConstitutiveRelation ConstitutiveRelation::l_plus_d(JetContext ctx, Expr L, Expr D) {
  for (int i = 0; i < ctx.m(); ++i)
    if (!ctx.admitted(0, i))
      throw ContextError("L+D systems need the time derivatives of all fields admitted");
  ConstitutiveRelation cr;
  cr.ctx_ = ctx;
  check_on_chart(ctx, L, "Lagrangian");
  check_on_chart(ctx, D, "dissipative potential");
  for (const Coordinate& z : ctx.admitted_jet1())
    cr.F_[{z.dirs[0], z.field}] = differentiate(L, z);
  for (int i = 0; i < ctx.m(); ++i)
    cr.Pi_.push_back(differentiate(L, ctx.fiber(i)) + differentiate(D, ctx.jet1(0, i)));
  cr.kind_ = KindLPlusD{std::move(L), std::move(D)};
  cr.validate();
  return cr;
}

ConstitutiveRelation ConstitutiveRelation::vector_potential(JetContext ctx, std::vector<Expr> h,
                                                            std::vector<Expr> Pi) {
  if (!ctx.is_ret())
    throw ContextError("vector-potential constitutive relations live on the RET chart");
  if ((int)h.size() != ctx.n1())
    throw ContextError("vector potential needs n+1 components h^mu");
  ConstitutiveRelation cr;
  cr.ctx_ = ctx;
  cr.Pi_ = Pi;
  for (int mu = 0; mu < ctx.n1(); ++mu)
    for (int i = 0; i < ctx.m(); ++i) {
      Expr f = differentiate(h[mu], ctx.fiber(i));
      if (!f.is_zero()) cr.F_[{mu, i}] = f;
    }
  cr.kind_ = KindVectorPotential{std::move(h), std::move(Pi)};
  cr.validate();
  return cr;
}

ConstitutiveRelation ConstitutiveRelation::ret(JetContext ctx,
                                               std::map<std::pair<int, int>, Expr> flux,
                                               std::vector<Expr> sources) {
  if (!ctx.is_ret()) throw ContextError("RET constitutive relations need an empty P");
  ConstitutiveRelation cr;
  cr.ctx_ = std::move(ctx);
  cr.kind_ = KindRet{};
  cr.F_ = std::move(flux);
  cr.Pi_ = std::move(sources);
  cr.validate();
  return cr;
}

Expr ConstitutiveRelation::F(int mu, int i) const {
  auto it = F_.find({mu, i});
  return it == F_.end() ? Expr::zero() : it->second;
}

Expr ConstitutiveRelation::Pi(int i) const { return Pi_[i]; }

ConstitutiveRelation ConstitutiveRelation::with_negated_source() const {
  ConstitutiveRelation out = *this;
  out.negate_source_ = !out.negate_source_;
  return out;
}

bool ConstitutiveRelation::is_conservative() const {
  for (const Expr& e : Pi_)
    if (!expands_to_zero(e)) return false;
  return true;
}

namespace {

Expr z_contract_F(const ConstitutiveRelation& cr) {
  Expr s = Expr::zero();
  for (const Coordinate& z : cr.ctx().admitted_jet1())
    s = s + Expr::coord(z) * cr.F(z.dirs[0], z.field);
  return s;
}

}  // namespace

CoveringCR lift_ccr(const ConstitutiveRelation& cr) {
  return CoveringCR{cr, -z_contract_F(cr)};
}

CoveringCR legendre_ccr(const ConstitutiveRelation& cr) {
  const Expr* L = nullptr;
  if (auto* k = std::get_if<KindLagrangian>(&cr.kind())) L = &k->L;
  else if (auto* k2 = std::get_if<KindSemiLagrangian>(&cr.kind())) L = &k2->L;
  else if (auto* k3 = std::get_if<KindLPlusD>(&cr.kind())) L = &k3->L;
  if (!L) throw ContextError("Legendre covering needs a (semi-)Lagrangian kind");
  return CoveringCR{cr, *L - z_contract_F(cr)};
}

MixedForm theta_pc(const ConstitutiveRelation& cr, const Connection* nu) {
  const JetContext& ctx = cr.ctx();
  DiffForm alpha;
  if (nu) {
    Expr trace = Expr::zero();
    for (int i = 0; i < ctx.m(); ++i)
      for (int mu = 0; mu < ctx.n1(); ++mu) trace = trace + cr.F(mu, i) * nu->at(i, mu);
    alpha = alpha + eta(ctx) * trace;
  }
  for (int i = 0; i < ctx.m(); ++i)
    for (int mu = 0; mu < ctx.n1(); ++mu) {
      Expr f = cr.F(mu, i);
      if (!f.is_zero())
        alpha = alpha + wedge(DiffForm::differential(ctx.fiber(i)), eta_mu(ctx, mu)) * f;
    }
  DiffForm beta;
  for (int i = 0; i < ctx.m(); ++i)
    beta = beta + wedge(DiffForm::differential(ctx.fiber(i)), eta(ctx)) * cr.source_term(i);
  return MixedForm{alpha, beta};
}

MixedForm theta_pc(const CoveringCR& ccr, const Connection* nu) {
  MixedForm f = theta_pc(ccr.cr, nu);
  f.alpha = f.alpha + eta(ccr.cr.ctx()) * ccr.p;
  return f;
}

SemiLagrangianVerdict is_semi_lagrangian(const ConstitutiveRelation& cr) {
  const JetContext& ctx = cr.ctx();
  SemiLagrangianVerdict v{SemiLagrangianVerdict::Status::Yes, std::nullopt, std::nullopt, ""};
  auto jets = ctx.admitted_jet1();
  for (const Coordinate& zmi : jets)
    for (const Coordinate& znj : jets) {
      Expr lhs = differentiate(cr.F(zmi.dirs[0], zmi.field), znj);
      Expr rhs = differentiate(cr.F(znj.dirs[0], znj.field), zmi);
      if (!expands_to_zero(lhs - rhs)) {
        if (equivalent(lhs, rhs) != Equivalence::NotEqual) {
          v.status = SemiLagrangianVerdict::Status::Inconclusive;
          v.note = "symmetry only verified numerically for dF^" +
                   ctx.base_names()[zmi.dirs[0]] + "_" + ctx.field_names()[zmi.field] +
                   "/dz(" + znj.name + ")";
          continue;
        }
        v.status = SemiLagrangianVerdict::Status::No;
        v.witness = std::array<int, 4>{zmi.dirs[0], (int)zmi.field, znj.dirs[0],
                                       (int)znj.field};
        return v;
      }
    }
  if (v.status != SemiLagrangianVerdict::Status::Yes) return v;
  // reconstruct L = int_0^1 sum z F(x, y, t z) dt for polynomial flux
  std::set<Coordinate, CoordLess> zvars(jets.begin(), jets.end());
  for (const Coordinate& z : jets)
    if (!polynomial_in(cr.F(z.dirs[0], z.field), zvars) ||
        has_unknowns(cr.F(z.dirs[0], z.field))) {
      v.note = "flux is not polynomial in the jets; L not reconstructed";
      v.status = SemiLagrangianVerdict::Status::Inconclusive;
      return v;
    }
  Expr tpar = Expr::param("__homotopy_t");
  Bindings scale;
  for (const Coordinate& z : jets) scale[z] = tpar * Expr::coord(z);
  // L(z) = int_0^1 sum_a z^a F_a(x, y, t z) dt: scale the flux argument only
  Expr integrand = Expr::zero();
  for (const Coordinate& z : jets)
    integrand =
        integrand + Expr::coord(z) * substitute(cr.F(z.dirs[0], z.field), scale);
  integrand = expand(integrand);
  // integrate the expanded polynomial in tpar over [0, 1]: t^k -> 1/(k+1)
  auto t_degree_of = [](const Expr& f, int& deg) {
    const Node& n = f.node();
    if (n.kind == Kind::Param && n.name == "__homotopy_t") { deg = 1; return true; }
    if (n.kind == Kind::Power && n.args[0].kind() == Kind::Param &&
        n.args[0].node().name == "__homotopy_t") {
      deg = (int)n.expo.convert_to<long>();
      return true;
    }
    return false;
  };
  auto integrate_term = [&](const Expr& term) {
    int deg = 0;
    if (t_degree_of(term, deg)) return Expr::num(Rational(1, deg + 1));
    if (term.kind() == Kind::Product) {
      int tdeg = 0;
      std::vector<Expr> rest;
      for (const Expr& f : term.node().args) {
        int d = 0;
        if (t_degree_of(f, d)) tdeg += d;
        else rest.push_back(f);
      }
      return Expr::prod(std::move(rest)) * Expr::num(Rational(1, tdeg + 1));
    }
    return term;  // t-free
  };
  if (integrand.kind() == Kind::Sum) {
    std::vector<Expr> xs;
    for (const Expr& t : integrand.node().args) xs.push_back(integrate_term(t));
    v.L = Expr::sum(std::move(xs));
  } else {
    v.L = integrate_term(integrand);
  }
  return v;
}

CcrContactForms ccr_contact_forms(const CoveringCR& ccr) {
  const JetContext& ctx = ccr.cr.ctx();
  Expr pzf = ccr.p + z_contract_F(ccr.cr);
  CcrContactForms out;
  for (int i = 0; i < ctx.m(); ++i) {
    Expr e = -ccr.cr.Pi(i) - differentiate(pzf, ctx.fiber(i));
    for (int mu = 0; mu < ctx.n1(); ++mu) {
      Expr f = ccr.cr.F(mu, i);
      if (f.is_zero()) continue;
      e = e + total_derivative(ctx, mu, f, DerivMode::Full) + ctx.lambdaG_d(mu) * f;
    }
    out.first.push_back(e);
  }
  for (const Coordinate& z : ctx.admitted_jet1())
    out.second[{z.dirs[0], z.field}] =
        ccr.cr.F(z.dirs[0], z.field) - differentiate(pzf, z);
  return out;
}

std::vector<bool> is_homogeneous(const ConstitutiveRelation& cr, const Connection& nu) {
  const JetContext& ctx = cr.ctx();
  nu.validate();
  MixedForm theta = theta_pc(cr, &nu);
  Monomial eta_mono;
  for (int mu = 0; mu < ctx.n1(); ++mu) eta_mono.d.push_back(ctx.base(mu));
  std::vector<bool> verdicts;
  for (int mu = 0; mu < ctx.n1(); ++mu) {
    VectorField xi(ctx);
    xi.set(ctx.base(mu), Expr::one());
    for (int i = 0; i < ctx.m(); ++i) xi.set(ctx.fiber(i), nu.at(i, mu));
    VectorField xi1 = prolong_vector_field(xi);
    DiffForm la = lie_derivative(xi1, theta.alpha);
    DiffForm lb = lie_derivative(xi1, theta.beta);
    bool ok = true;
    for (auto& [m, c] : la.terms()) {
      if (compare(m, eta_mono) == 0) continue;  // q eta slot is free
      if (!expands_to_zero(c)) ok = false;
    }
    for (auto& [m, c] : lb.terms())
      if (!expands_to_zero(c)) ok = false;
    verdicts.push_back(ok);
  }
  return verdicts;
}

}  // namespace jc
