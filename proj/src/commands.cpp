#include "jetcartan/commands.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <random>
#include <sstream>

#include "jetcartan/classify.hpp"
#include "jetcartan/noether.hpp"
#include "jetcartan/ret.hpp"

namespace jc {

namespace {

using nlohmann::json;

std::string numstr(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ParamValues merged_params(const SystemFile& sys, const RunOptions& opt) {
  ParamValues pv(sys.param_values.begin(), sys.param_values.end());
  for (auto& [k, v] : opt.params) pv[k] = v;
  return pv;
}

const ConstitutiveRelation& need_cr(const SystemFile& sys) {
  if (!sys.cr) throw ContextError("this command needs a [constitutive] section");
  return *sys.cr;
}

const VectorField& need_field(const SystemFile& sys, const RunOptions& opt) {
  if (opt.field.empty()) throw ContextError("this command needs --field <name>");
  auto it = sys.vectorfields.find(opt.field);
  if (it == sys.vectorfields.end())
    throw ContextError("no vector field named '" + opt.field + "' in [vectorfields]");
  return it->second;
}

NumPoint point_from_at(const JetContext& ctx, const std::map<std::string, double>& at) {
  NumPoint pt;
  for (auto& [name, value] : at) {
    Expr e = ctx.parse_expr(name);
    if (e.kind() != Kind::Coord)
      throw ContextError("--at entries name chart coordinates; got '" + name + "'");
    pt[e.node().coord] = value;
  }
  return pt;
}

CoveringCR covering_for(const ConstitutiveRelation& cr) {
  if (std::holds_alternative<KindLagrangian>(cr.kind()) ||
      std::holds_alternative<KindSemiLagrangian>(cr.kind()) ||
      std::holds_alternative<KindLPlusD>(cr.kind()))
    return legendre_ccr(cr);
  return lift_ccr(cr);
}

struct Report {
  std::ostringstream text;
  json j = json::object();
  bool failed = false;

  void line(const std::string& s) { text << s << "\n"; }
  void check(const std::string& name, bool ok, const std::string& detail = "") {
    text << (ok ? "pass: " : "FAIL: ") << name;
    if (!detail.empty()) text << " (" << detail << ")";
    text << "\n";
    if (!ok) failed = true;
    j["checks"][name] = ok;
  }
};

CommandResult finish(Report& rep, const RunOptions& opt) {
  CommandResult out;
  out.exit_code = rep.failed ? 1 : 0;
  out.text = rep.text.str();
  if (opt.json) out.json = rep.j.dump(2) + "\n";
  return out;
}

// ----------------------------------------------------------------- commands

CommandResult cmd_derive(SystemFile& sys, const RunOptions& opt) {
  const ConstitutiveRelation& cr = need_cr(sys);
  BalanceSystem b = generate(cr);
  Report rep;
  rep.j["command"] = "derive";
  rep.line("balance system (" + b.provenance + ", reduced-horizontal route agrees):");
  for (int i = 0; i < b.ctx.m(); ++i) {
    std::string r = render(b.residuals[i]);
    rep.line("  [" + b.ctx.field_names()[i] + "]  " + r + " = 0");
    rep.j["residuals"][b.ctx.field_names()[i]] = r;
  }
  return finish(rep, opt);
}

CommandResult cmd_el_compare(SystemFile& sys, const RunOptions& opt) {
  const ConstitutiveRelation& cr = need_cr(sys);
  const Expr* L = nullptr;
  if (auto* k = std::get_if<KindLagrangian>(&cr.kind())) L = &k->L;
  if (!L) throw ContextError("el-compare needs kind = lagrangian");
  BalanceSystem via_cr = generate(cr);
  BalanceSystem via_el = euler_lagrange(*L, cr.ctx());
  Report rep;
  rep.j["command"] = "el-compare";
  for (int i = 0; i < cr.ctx().m(); ++i) {
    bool ok = expands_to_zero(via_cr.residuals[i] - via_el.residuals[i]);
    rep.check("generate == euler_lagrange for " + cr.ctx().field_names()[i], ok);
  }
  return finish(rep, opt);
}

CommandResult cmd_admissible(SystemFile& sys, const RunOptions& opt) {
  const ConstitutiveRelation& cr = need_cr(sys);
  const VectorField& xi = need_field(sys, opt);
  const JetContext& ctx = cr.ctx();
  Report rep;
  rep.j["command"] = "admissible";
  // partial non-RET charts follow the admitted-pair treatment
  AdmissibilityPath path = (!ctx.is_full() && !ctx.is_ret()) ? AdmissibilityPath::PRestricted
                                                             : AdmissibilityPath::Full;
  DeterminingSystem sys_eqs = admissibility_system(cr, xi, path);
  rep.j["path"] = path == AdmissibilityPath::Full ? "full" : "admitted-pairs";
  bool has_unknowns_any = false;
  for (auto& [c, e] : xi.components())
    if (has_unknowns(e)) has_unknowns_any = true;
  if (sys_eqs.equations.empty()) {
    rep.check("FDiv(xi) = 0", true, "identically");
    return finish(rep, opt);
  }
  rep.line("determining system (coefficients of jet monomials):");
  json eqs = json::array();
  for (auto& eq : sys_eqs.equations) {
    rep.line("  [" + eq.monomial + "]  " + render(eq.equation) + " = 0");
    eqs.push_back({{"monomial", eq.monomial}, {"equation", render(eq.equation)}});
  }
  rep.j["equations"] = eqs;
  if (!has_unknowns_any) rep.check("FDiv(xi) = 0", sys_eqs.all_zero());
  return finish(rep, opt);
}

CommandResult cmd_symmetry(SystemFile& sys, const RunOptions& opt) {
  const ConstitutiveRelation& cr = need_cr(sys);
  const VectorField& xi = need_field(sys, opt);
  Report rep;
  rep.j["command"] = "symmetry";
  DeterminingSystem sys_eqs = symmetry_system(cr, xi);
  bool has_unknowns_any = false;
  for (auto& [c, e] : xi.components())
    if (has_unknowns(e)) has_unknowns_any = true;
  if (sys_eqs.equations.empty()) {
    rep.check("infinitesimal symmetry of (F, Pi)", true, "determining equations vanish");
    return finish(rep, opt);
  }
  rep.line("determining equations (flux and source families):");
  json eqs = json::array();
  for (auto& eq : sys_eqs.equations) {
    rep.line("  [" + eq.monomial + "]  " + render(eq.equation) + " = 0");
    eqs.push_back({{"monomial", eq.monomial}, {"equation", render(eq.equation)}});
  }
  rep.j["equations"] = eqs;
  if (!has_unknowns_any) rep.check("infinitesimal symmetry of (F, Pi)", sys_eqs.all_zero());
  return finish(rep, opt);
}

CommandResult cmd_noether(SystemFile& sys, const RunOptions& opt) {
  const ConstitutiveRelation& cr = need_cr(sys);
  const VectorField& xi = need_field(sys, opt);
  CoveringCR ccr = covering_for(cr);
  Report rep;
  rep.j["command"] = "noether";
  SymmetryVerdict verdict = classify_symmetry(ccr, xi);
  std::string cls;
  switch (verdict.cls) {
    case SymmetryClass::Variational: cls = "variational"; break;
    case SymmetryClass::Noether: cls = "noether"; break;
    case SymmetryClass::Cartan: cls = "cartan"; break;
    case SymmetryClass::None: cls = "none"; break;
  }
  rep.line("symmetry class: " + cls + (verdict.detail.empty() ? "" : " - " + verdict.detail));
  rep.j["symmetry_class"] = cls;
  DiffForm J = noether_current(ccr, xi);
  rep.line("current i_{xi^1} Theta^{n+1}: " + render(J));
  rep.j["current"] = render(J);
  if (!opt.section.empty()) {
    auto it = sys.sections.find(opt.section);
    if (it == sys.sections.end())
      throw ContextError("no section named '" + opt.section + "' in [sections]");
    NumericSection s;
    s.closed_form = it->second;
    s.stencil_order = opt.stencil;
    GridSpec grid;
    for (int a = 0; a < cr.ctx().n1(); ++a) {
      grid.lo.push_back(0.0);
      grid.hi.push_back(1.0);
      grid.n.push_back(opt.grid);
    }
    NoetherReport nr = noether_residual(ccr, xi, s, grid, merged_params(sys, opt));
    rep.j["residual_exact_zero"] = nr.exact_zero;
    if (nr.exact_zero) {
      rep.check("Noether balance holds along '" + opt.section + "'", true, "exact");
    } else {
      rep.j["max_deviation"] = numstr(nr.max_deviation);
      rep.check("Noether balance holds along '" + opt.section + "'",
                nr.max_deviation <= opt.tol,
                "max deviation " + numstr(nr.max_deviation));
    }
  }
  return finish(rep, opt);
}

CommandResult cmd_energy_momentum(SystemFile& sys, const RunOptions& opt) {
  const ConstitutiveRelation& cr = need_cr(sys);
  EnergyMomentum em = energy_momentum(cr, sys.connection);
  Report rep;
  rep.j["command"] = "energy-momentum";
  const JetContext& ctx = cr.ctx();
  rep.line("energy-momentum tensor T^nu_mu:");
  for (int v = 0; v < ctx.n1(); ++v)
    for (int mu = 0; mu < ctx.n1(); ++mu) {
      std::string key = "T[" + ctx.base_names()[v] + "," + ctx.base_names()[mu] + "]";
      rep.line("  " + key + " = " + render(em.T[v][mu]));
      rep.j["T"][key] = render(em.T[v][mu]);
    }
  for (int mu = 0; mu < ctx.n1(); ++mu) {
    std::string name = "admissibility F^nu_i d_nu Gamma^i_" + ctx.base_names()[mu] + " = 0";
    rep.line(std::string(em.condition_holds[mu] ? "holds:  " : "fails:  ") + name +
             "  (reported, not enforced)");
    rep.j["condition_holds"][ctx.base_names()[mu]] = (bool)em.condition_holds[mu];
  }
  return finish(rep, opt);
}

CommandResult cmd_classify(SystemFile& sys, const RunOptions& opt) {
  const ConstitutiveRelation& cr = need_cr(sys);
  TypeIndex t = classify(cr, point_from_at(cr.ctx(), opt.at), merged_params(sys, opt));
  Report rep;
  rep.j["command"] = "classify";
  rep.line("type index (h, p, e) = (" + std::to_string(t.h) + ", " + std::to_string(t.p) +
           ", " + std::to_string(t.e) + ")");
  rep.j["h"] = t.h;
  rep.j["p"] = t.p;
  rep.j["e"] = t.e;
  if (t.regularity_applicable) {
    rep.line(std::string("regularity det(dF0/dy) != 0: ") + (t.regular ? "yes" : "no"));
    rep.j["regular"] = t.regular;
  }
  for (const std::string& w : t.warnings) rep.line("warning: " + w);
  rep.j["warnings"] = t.warnings;
  return finish(rep, opt);
}

CommandResult cmd_verify(SystemFile& sys, const RunOptions& opt) {
  const ConstitutiveRelation& cr = need_cr(sys);
  if (opt.section.empty()) throw ContextError("verify needs --section <name>");
  auto it = sys.sections.find(opt.section);
  if (it == sys.sections.end())
    throw ContextError("no section named '" + opt.section + "' in [sections]");
  BalanceSystem b = generate(cr);
  NumericSection s;
  s.closed_form = it->second;
  s.stencil_order = opt.stencil;
  GridSpec grid;
  for (int a = 0; a < cr.ctx().n1(); ++a) {
    grid.lo.push_back(0.0);
    grid.hi.push_back(1.0);
    grid.n.push_back(opt.grid);
  }
  SectionReport sr = verify_section(b, s, grid, merged_params(sys, opt));
  Report rep;
  rep.j["command"] = "verify";
  rep.j["max_residual"] = numstr(sr.max_residual);
  rep.line("max |residual| over the grid: " + numstr(sr.max_residual));
  for (int i = 0; i < cr.ctx().m(); ++i) {
    rep.line("L2 residual [" + cr.ctx().field_names()[i] + "]: " + numstr(sr.l2_residual[i]));
    rep.j["l2"][cr.ctx().field_names()[i]] = numstr(sr.l2_residual[i]);
  }
  rep.check("residual below tolerance " + numstr(opt.tol), sr.max_residual <= opt.tol);
  return finish(rep, opt);
}

CommandResult cmd_ret_audit(SystemFile& sys, const RunOptions& opt) {
  if (!sys.ret.present) throw ContextError("ret-audit needs a [ret] section");
  const JetContext& ctx = sys.ctx;
  const JetContext& dual = sys.ret.dual;
  ParamValues pv = merged_params(sys, opt);
  Report rep;
  rep.j["command"] = "ret-audit";

  if (sys.ret.h0) {
    LagrangeLiu ll = lagrange_liu_map(ctx, *sys.ret.h0, 64, pv);
    std::string verdict;
    bool convex = ll.convexity.verdict == ConvexityReport::Verdict::NegativeDefinite;
    switch (ll.convexity.verdict) {
      case ConvexityReport::Verdict::NegativeDefinite: verdict = "sampled negative definite"; break;
      case ConvexityReport::Verdict::Degenerate: verdict = "degenerate"; break;
      case ConvexityReport::Verdict::WrongSign: verdict = "wrong sign (positive definite)"; break;
      case ConvexityReport::Verdict::Indefinite: verdict = "indefinite"; break;
    }
    rep.j["convexity"] = verdict;
    rep.check("entropy Hessian negative definite (sampled, not proven)", convex, verdict);
    json lam = json::array();
    for (int i = 0; i < ctx.m(); ++i) {
      rep.line("lambda^" + std::to_string(i + 1) + " = " + render(ll.lambda[i]));
      lam.push_back(render(ll.lambda[i]));
    }
    rep.j["multipliers"] = lam;
    if (convex) {
      std::mt19937_64 rng(0xabcd);
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      double worst = 0;
      for (int k = 0; k < 20; ++k) {
        std::vector<double> u(ctx.m());
        NumPoint pt;
        for (int i = 0; i < ctx.m(); ++i) {
          u[i] = dist(rng);
          pt[ctx.fiber(i)] = u[i];
        }
        std::vector<double> target(ctx.m());
        for (int i = 0; i < ctx.m(); ++i) target[i] = evaluate(ll.lambda[i], pt, pv);
        LegendreInverse inv =
            invert_legendre(ctx, ll.lambda, target, std::vector<double>(ctx.m(), 0.0), pv);
        for (int i = 0; i < ctx.m(); ++i) worst = std::max(worst, std::abs(inv.u[i] - u[i]));
      }
      rep.j["legendre_roundtrip_error"] = numstr(worst);
      rep.check("Legendre round-trip below 1e-10", worst < 1e-10, numstr(worst));
    }
    // primal entropy relations d h^mu / d u = lambda . d F^mu / d u
    if (sys.cr) {
      bool all_ok = true;
      std::vector<Expr> hmu = sys.ret.hflux;
      hmu[0] = *sys.ret.h0;
      for (int mu = 0; mu < ctx.n1(); ++mu)
        for (int i = 0; i < ctx.m(); ++i) {
          Expr lhs = differentiate(hmu[mu], ctx.fiber(i));
          Expr rhs = Expr::zero();
          for (int j = 0; j < ctx.m(); ++j)
            rhs = rhs + ll.lambda[j] * differentiate(sys.cr->F(mu, j), ctx.fiber(i));
          if (!expands_to_zero(lhs - rhs) &&
              equivalent(lhs, rhs) == Equivalence::NotEqual)
            all_ok = false;
        }
      rep.check("entropy relations dh^mu/du = lambda . dF^mu/du", all_ok);
    }
  }

  if (sys.ret.hhat) {
    std::map<std::pair<int, int>, Expr> Ftilde;
    for (int mu = 0; mu < dual.n1(); ++mu)
      for (int i = 0; i < dual.m(); ++i)
        Ftilde[{mu, i}] = differentiate((*sys.ret.hhat)[mu], dual.fiber(i));
    HolonomicityReport hrep = holonomicity_check(dual, *sys.ret.hhat, Ftilde);
    rep.check("holonomicity F~ = d hhat / d lambda", hrep.holonomic);
    std::vector<Expr> dpi =
        sys.ret.dual_pi ? *sys.ret.dual_pi
                        : (sys.ret.psi ? production_from_potential(dual, *sys.ret.psi)
                                       : std::vector<Expr>(dual.m(), Expr::zero()));
    BalanceSystem b = dual_balance_system(dual, *sys.ret.hhat, dpi);
    rep.line("dual balance system:");
    for (int i = 0; i < dual.m(); ++i) {
      rep.line("  [" + dual.field_names()[i] + "]  " + render(b.residuals[i]) + " = 0");
      rep.j["dual_residuals"][dual.field_names()[i]] = render(b.residuals[i]);
    }
    rep.check("dual coefficient matrices are symmetric Hessians", true, "by construction");
  }

  std::optional<std::vector<Expr>> pi_for_sigma = sys.ret.dual_pi;
  if (!pi_for_sigma && sys.ret.psi)
    pi_for_sigma = production_from_potential(dual, *sys.ret.psi);
  if (pi_for_sigma) {
    ResidualInequalityReport rr = residual_inequality(dual, *pi_for_sigma, 1000, 2.0, pv);
    rep.j["residual_inequality_min"] = numstr(rr.min_value);
    rep.check("residual inequality Sigma = lambda . Pi >= 0 (1000 samples)", rr.satisfied,
              "min " + numstr(rr.min_value));
  }
  if (sys.ret.psi) {
    ResidualInequalityReport rm = radial_monotonicity(dual, *sys.ret.psi, 1000, 2.0, pv);
    rep.check("radial monotonicity zeta . Psi >= 0 (1000 samples)", rm.satisfied,
              "min " + numstr(rm.min_value));
  }
  return finish(rep, opt);
}

CommandResult cmd_forms_selftest(const RunOptions& opt) {
  SelfTestReport r = selftest();
  Report rep;
  rep.j["command"] = "forms-selftest";
  for (const std::string& l : r.lines) rep.line(l);
  rep.line("selftest: " + std::to_string(r.passed) + " passed, " + std::to_string(r.failed) +
           " failed");
  rep.j["passed"] = r.passed;
  rep.j["failed"] = r.failed;
  rep.failed = r.failed > 0;
  return finish(rep, opt);
}

}  // namespace

CommandResult run_command(const std::string& command, SystemFile& sys,
                          const RunOptions& options) {
  if (command == "derive") return cmd_derive(sys, options);
  if (command == "el-compare") return cmd_el_compare(sys, options);
  if (command == "admissible") return cmd_admissible(sys, options);
  if (command == "symmetry") return cmd_symmetry(sys, options);
  if (command == "noether") return cmd_noether(sys, options);
  if (command == "energy-momentum") return cmd_energy_momentum(sys, options);
  if (command == "classify") return cmd_classify(sys, options);
  if (command == "ret-audit") return cmd_ret_audit(sys, options);
  if (command == "verify") return cmd_verify(sys, options);
  if (command == "forms-selftest") return cmd_forms_selftest(options);
  CommandResult out;
  out.exit_code = 2;
  out.text = "unknown command '" + command + "'\n";
  return out;
}

SelfTestReport selftest(bool corrupt_eta_table) {
  SelfTestReport r;
  auto tally = [&](const std::string& name, int pass, int total) {
    r.passed += pass;
    r.failed += total - pass;
    r.lines.push_back(name + ": " + std::to_string(pass) + "/" + std::to_string(total));
  };

  // volume-contraction table
  int table_pass = 0, table_total = 0;
  for (int n1 = 2; n1 <= 4; ++n1) {
    std::vector<std::string> bn;
    for (int k = 0; k < n1; ++k) bn.push_back("x" + std::to_string(k));
    JetContext flat = ContextBuilder().base(bn).fields({"y"}).all_jets().build();
    std::vector<std::vector<Expr>> g(n1, std::vector<Expr>(n1, Expr::zero()));
    for (int k = 0; k < n1; ++k)
      g[k][k] = k == 1 ? Expr::call(Builtin::Exp, Expr::coord(flat.base(0))) : Expr::one();
    JetContext curved = flat.with_metric(std::move(g));
    for (const JetContext& ctx : {flat, curved}) {
      for (int sigma = 0; sigma < n1; ++sigma)
        for (int mu = 0; mu < n1; ++mu)
          for (int nu = 0; nu < n1; ++nu) {
            if (mu == nu) continue;
            ++table_total;
            DiffForm lhs =
                wedge(DiffForm::differential(ctx.base(sigma)), eta_form(ctx, {mu, nu}));
            DiffForm want;
            if (sigma == nu) want = eta_mu(ctx, mu);
            else if (sigma == mu) want = -eta_mu(ctx, nu);
            if (corrupt_eta_table && sigma == nu) want = -want;  // planted fault
            if (exactly_equal(lhs, want)) ++table_pass;
          }
      for (int mu = 0; mu < n1; ++mu) {
        ++table_total;
        if (exactly_equal(exterior_d(eta_mu(ctx, mu)), eta(ctx) * ctx.lambdaG_d(mu)))
          ++table_pass;
      }
    }
  }
  tally("eta contraction table", table_pass, table_total);

  // differential laws
  JetContext bur =
      ContextBuilder().base({"t", "x"}).fields({"y"}).jet("x", "y").params({"delta"}).build();
  JetContext full = ContextBuilder().base({"t", "x"}).fields({"y"}).all_jets().build();
  auto atoms = [&](const JetContext& ctx) {
    std::vector<Expr> out;
    for (int mu = 0; mu < ctx.n1(); ++mu) out.push_back(Expr::coord(ctx.base(mu)));
    for (int i = 0; i < ctx.m(); ++i) out.push_back(Expr::coord(ctx.fiber(i)));
    for (const Coordinate& c : ctx.admitted_jet1()) out.push_back(Expr::coord(c));
    return out;
  };
  std::mt19937_64 rng(20240901);
  auto random_form = [&](const JetContext& ctx, int max_deg) {
    std::vector<Coordinate> diffs;
    for (int mu = 0; mu < ctx.n1(); ++mu) diffs.push_back(ctx.base(mu));
    for (int i = 0; i < ctx.m(); ++i) diffs.push_back(ctx.fiber(i));
    for (const Coordinate& c : ctx.admitted_jet1()) diffs.push_back(c);
    std::vector<Expr> at = atoms(ctx);
    std::function<Expr(int)> gen = [&](int d) -> Expr {
      if (d == 0) return at[rng() % at.size()];
      switch (rng() % 4) {
        case 0: return gen(d - 1) + gen(d - 1);
        case 1: return gen(d - 1) * at[rng() % at.size()];
        case 2: return Expr::num((long)(rng() % 5) - 2);
        default: return at[rng() % at.size()];
      }
    };
    DiffForm f;
    int terms = 1 + (int)(rng() % 2);
    for (int t = 0; t < terms; ++t) {
      int deg = (int)(rng() % (max_deg + 1));
      Monomial m;
      std::vector<Coordinate> pick = diffs;
      for (int k = 0; k < deg && !pick.empty(); ++k) {
        size_t i = rng() % pick.size();
        m.d.push_back(pick[i]);
        pick.erase(pick.begin() + i);
      }
      std::sort(m.d.begin(), m.d.end(),
                [](const Coordinate& a, const Coordinate& b) { return compare(a, b) < 0; });
      f.add(m, gen(2));
    }
    return f;
  };

  int dd = 0;
  for (int k = 0; k < 200; ++k) {
    const JetContext& ctx = k % 2 ? bur : full;
    if (exactly_zero(exterior_d(exterior_d(random_form(ctx, 2))))) ++dd;
  }
  tally("d^2 = 0", dd, 200);

  int dhh = 0;
  for (int k = 0; k < 200; ++k) {
    const JetContext& ctx = k % 2 ? bur : full;
    DiffForm w = random_form(ctx, 2);
    if (exactly_zero(reduced_horizontal_d(ctx, reduced_horizontal_d(ctx, w)))) ++dhh;
  }
  tally("dhat^2 = 0", dhh, 200);

  int dtt = 0;
  for (int k = 0; k < 200; ++k) {
    const JetContext& ctx = k % 2 ? bur : full;
    MixedForm f{random_form(ctx, 1).part(1), random_form(ctx, 2).part(2)};
    MixedForm z = iglesias_d(iglesias_d(f));
    if (exactly_zero(z.alpha) && exactly_zero(z.beta)) ++dtt;
  }
  tally("dtilde^2 = 0", dtt, 200);

  int hc = 0;
  for (int k = 0; k < 100; ++k) {
    const JetContext& ctx = k % 2 ? bur : full;
    DiffForm w = random_form(ctx, 1);
    DiffForm diff = reduced_horizontal_d(ctx, w) - exterior_d(w);
    if (exactly_zero(horizontal_projection(ctx, diff, DerivMode::Full))) ++hc;
  }
  tally("h0((dhat - d) nu) = 0", hc, 100);

  // prolongation homomorphism
  int hom = 0;
  for (int k = 0; k < 50; ++k) {
    const JetContext& ctx = k % 2 ? bur : full;
    auto mk = [&]() {
      VectorField v(ctx);
      Expr xs = Expr::coord(ctx.base(1));
      v.set(ctx.base(1), xs * Expr::num((long)(rng() % 3)));
      if (same_context(ctx, full))
        v.set(ctx.base(0), Expr::coord(ctx.base(0)) * Expr::num((long)(rng() % 3)));
      std::vector<Expr> at;
      at.push_back(Expr::coord(ctx.fiber(0)));
      if (same_context(ctx, full)) at.push_back(Expr::coord(ctx.base(0)));
      at.push_back(xs);
      std::function<Expr(int)> gen = [&](int d) -> Expr {
        if (d == 0) return at[rng() % at.size()];
        if (rng() % 2) return gen(d - 1) + gen(d - 1);
        return gen(d - 1) * at[rng() % at.size()];
      };
      v.set(ctx.fiber(0), gen(2));
      return v;
    };
    VectorField a = mk(), b = mk();
    VectorField lhs = prolong_vector_field(bracket(a, b));
    VectorField rhs = bracket(prolong_vector_field(a), prolong_vector_field(b));
    bool ok = true;
    std::set<Coordinate, CoordLess> keys;
    for (auto& [c, e] : lhs.components()) keys.insert(c);
    for (auto& [c, e] : rhs.components()) keys.insert(c);
    for (const Coordinate& c : keys)
      if (!expands_to_zero(lhs.component(c) - rhs.component(c))) ok = false;
    if (ok) ++hom;
  }
  tally("[xi,eta]^1 = [xi^1,eta^1]", hom, 50);
  return r;
}

}  // namespace jc
