#include <doctest.h>

#include "jetcartan/exterior.hpp"
#include "jetcartan/prolong.hpp"
#include "test_helpers.hpp"

using namespace jc;
using jct::burgers_ctx;
using jct::full_ctx_2d;

namespace {

JetContext exp_metric_ctx() {
  JetContext ctx = full_ctx_2d();
  Expr x1 = Expr::coord(ctx.base(1));
  std::vector<std::vector<Expr>> g{
      {Expr::one(), Expr::zero()},
      {Expr::zero(), Expr::call(Builtin::Exp, Expr::num(2l) * x1)}};
  return ctx.with_metric(std::move(g));
}

}  // namespace

TEST_CASE("eta contractions in two euclidean dimensions") {
  JetContext ctx = full_ctx_2d();
  DiffForm eta0 = eta_mu(ctx, 0);
  DiffForm eta1 = eta_mu(ctx, 1);
  CHECK(exactly_equal(eta0, DiffForm::differential(ctx.base(1))));
  CHECK(exactly_equal(eta1, -DiffForm::differential(ctx.base(0))));
}

TEST_CASE("dx^mu ^ eta_mu = eta in every dimension") {
  for (int n1 = 2; n1 <= 4; ++n1) {
    std::vector<std::string> bn;
    for (int k = 0; k < n1; ++k) bn.push_back("x" + std::to_string(k));
    JetContext ctx = ContextBuilder().base(bn).fields({"y"}).all_jets().build();
    for (int mu = 0; mu < n1; ++mu) {
      DiffForm lhs = wedge(DiffForm::differential(ctx.base(mu)), eta_mu(ctx, mu));
      CHECK(exactly_equal(lhs, eta(ctx)));
    }
  }
}

TEST_CASE("eta_{mu nu} is antisymmetric and flags a repeated pair") {
  JetContext ctx = exp_metric_ctx();
  CHECK(exactly_equal(eta_form(ctx, {0, 1}), -eta_form(ctx, {1, 0})));
  bool repeated = false;
  CHECK(eta_form(ctx, {1, 1}, &repeated).is_zero());
  CHECK(repeated);
}

TEST_CASE("contraction table: dx^sigma ^ eta_{mu nu} for n+1 in {2,3,4}") {
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
            DiffForm lhs = wedge(DiffForm::differential(ctx.base(sigma)), eta_form(ctx, {mu, nu}));
            DiffForm want;
            if (sigma == nu) want = eta_mu(ctx, mu);
            else if (sigma == mu) want = -eta_mu(ctx, nu);
            CHECK(exactly_equal(lhs, want));
          }
    }
  }
}

TEST_CASE("d eta_mu = lambda_{G,mu} eta, including a non-constant diagonal metric") {
  JetContext ctx = exp_metric_ctx();
  for (int mu = 0; mu < 2; ++mu)
    CHECK(exactly_equal(exterior_d(eta_mu(ctx, mu)), eta(ctx) * ctx.lambdaG_d(mu)));
  // hand value: sqrt|G| = e^{x}, so lambda_{G,1} = 1
  CHECK(struct_eq(ctx.lambdaG_d(1), Expr::one()));
  CHECK(exactly_equal(exterior_d(eta_mu(ctx, 1)), eta(ctx)));
}

TEST_CASE("d eta_{mu nu} = lambda_{G,nu} eta_mu - lambda_{G,mu} eta_nu") {
  std::vector<std::string> bn{"x0", "x1", "x2"};
  JetContext flat = ContextBuilder().base(bn).fields({"y"}).all_jets().build();
  std::vector<std::vector<Expr>> g(3, std::vector<Expr>(3, Expr::zero()));
  g[0][0] = Expr::one();
  g[1][1] = Expr::call(Builtin::Exp, Expr::num(2l) * Expr::coord(flat.base(0)));
  g[2][2] = Expr::call(Builtin::Exp, Expr::num(2l) * Expr::coord(flat.base(2)));
  JetContext ctx = flat.with_metric(std::move(g));
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = 0; nu < 3; ++nu) {
      if (mu == nu) continue;
      DiffForm want = eta_mu(ctx, mu) * ctx.lambdaG_d(nu) - eta_mu(ctx, nu) * ctx.lambdaG_d(mu);
      CHECK(exactly_equal(exterior_d(eta_form(ctx, {mu, nu})), want));
    }
}

TEST_CASE("d^2 = 0 on random forms") {
  JetContext full = full_ctx_2d();
  JetContext partial = burgers_ctx();
  for (const JetContext& ctx : {full, partial}) {
    jct::ExprGen gen(101, jct::chart_atoms(ctx));
    for (int trial = 0; trial < 60; ++trial) {
      DiffForm w = jct::random_form(gen, ctx, 2);
      CHECK(exactly_zero(exterior_d(exterior_d(w))));
    }
  }
}

TEST_CASE("interior product is an antiderivation on random inputs") {
  JetContext ctx = full_ctx_2d();
  jct::ExprGen gen(57, jct::chart_atoms(ctx));
  VectorField xi(ctx);
  xi.set(ctx.base(0), gen.gen(2));
  xi.set(ctx.fiber(0), gen.gen(2));
  xi.set(ctx.jet1(1, 0), gen.gen(2));
  for (int trial = 0; trial < 25; ++trial) {
    DiffForm a = jct::random_form(gen, ctx, 2).part(1);
    DiffForm b = jct::random_form(gen, ctx, 2);
    DiffForm lhs = interior_product(xi, wedge(a, b));
    DiffForm rhs = wedge(interior_product(xi, a), b) - wedge(a, interior_product(xi, b));
    // |a| = 1 so the sign on the second term is (-1)^1
    CHECK(exactly_equal(lhs, rhs));
  }
}

TEST_CASE("i_{d/dy}(F^mu dy ^ eta_mu) = F^mu eta_mu") {
  JetContext ctx = full_ctx_2d();
  Expr F0 = ctx.parse_expr("y^2"), F1 = ctx.parse_expr("y*d(y,x)");
  DiffForm w = wedge(DiffForm::differential(ctx.fiber(0)), eta_mu(ctx, 0)) * F0 +
               wedge(DiffForm::differential(ctx.fiber(0)), eta_mu(ctx, 1)) * F1;
  VectorField dy(ctx);
  dy.set(ctx.fiber(0), Expr::one());
  CHECK(exactly_equal(interior_product(dy, w), eta_mu(ctx, 0) * F0 + eta_mu(ctx, 1) * F1));
}

TEST_CASE("Lie derivative is linear in the field") {
  JetContext ctx = full_ctx_2d();
  jct::ExprGen gen(73, jct::chart_atoms(ctx));
  VectorField a(ctx), b(ctx);
  a.set(ctx.base(1), gen.gen(2));
  a.set(ctx.fiber(0), gen.gen(2));
  b.set(ctx.fiber(0), gen.gen(2));
  b.set(ctx.jet1(0, 0), gen.gen(2));
  for (int trial = 0; trial < 10; ++trial) {
    DiffForm w = jct::random_form(gen, ctx, 2);
    DiffForm lhs = lie_derivative(a + b, w);
    DiffForm rhs = lie_derivative(a, w) + lie_derivative(b, w);
    CHECK(exactly_equal(lhs, rhs));
  }
}

TEST_CASE("total derivative: full vs reduced mode") {
  JetContext ctx = burgers_ctx();
  Expr flux = ctx.parse_expr("y^2/2 - delta*d(y,x)");
  Expr dx = total_derivative(ctx, 1, flux, DerivMode::Full);
  Expr want = ctx.parse_expr("y*d(y,x) - delta*d(y,x,x)");
  CHECK(exactly_equal(dx, want));
  // reduced d_t(y) = 0 while full d_t(y) = y_{;t}
  Expr y = Expr::coord(ctx.fiber(0));
  CHECK(total_derivative(ctx, 0, y, DerivMode::Reduced).is_zero());
  CHECK(struct_eq(total_derivative(ctx, 0, y, DerivMode::Full),
                  Expr::coord(ctx.jet(0, {0}))));
}

TEST_CASE("[d_mu, d/dx^nu] = 0 on random expressions") {
  JetContext ctx = burgers_ctx();
  jct::ExprGen gen(77, jct::chart_atoms(ctx));
  for (int trial = 0; trial < 30; ++trial) {
    Expr f = gen.gen(3);
    for (int mu = 0; mu < 2; ++mu)
      for (int nu = 0; nu < 2; ++nu)
        for (DerivMode mode : {DerivMode::Full, DerivMode::Reduced}) {
          Expr ab = differentiate(total_derivative(ctx, mu, f, mode), ctx.base(nu));
          Expr ba = total_derivative(ctx, mu, differentiate(f, ctx.base(nu)), mode);
          CHECK(expands_to_zero(ab - ba));
        }
  }
}

TEST_CASE("horizontal projection: generators, idempotence, modes") {
  JetContext ctx = burgers_ctx();
  CHECK(exactly_equal(horizontal_projection(ctx, DiffForm::differential(ctx.base(0))),
                      DiffForm::differential(ctx.base(0))));
  DiffForm omega = contact_generators(ctx)[0];  // dy - z_x dx
  // full mode leaves the prolongation-level time slot
  DiffForm h_full = horizontal_projection(ctx, omega, DerivMode::Full);
  DiffForm want = DiffForm::term(Monomial{{ctx.base(0)}}, Expr::coord(ctx.jet(0, {0})));
  CHECK(exactly_equal(h_full, want));
  // reduced mode annihilates the partial contact ideal
  CHECK(horizontal_projection(ctx, omega, DerivMode::Reduced).is_zero());
  JetContext full = full_ctx_2d();
  for (const DiffForm& gen_form : contact_generators(full))
    CHECK(horizontal_projection(full, gen_form, DerivMode::Full).is_zero());
  jct::ExprGen gen(91, jct::chart_atoms(ctx));
  auto gens = contact_generators(ctx);
  for (int trial = 0; trial < 20; ++trial) {
    DiffForm w = wedge(gens[trial % gens.size()], jct::random_form(gen, ctx, 1));
    CHECK(exactly_zero(horizontal_projection(ctx, w, DerivMode::Reduced)));
  }
  for (int trial = 0; trial < 20; ++trial) {
    DiffForm w = jct::random_form(gen, ctx, 2);
    DiffForm once = horizontal_projection(ctx, w);
    CHECK(exactly_equal(horizontal_projection(ctx, once), once));
  }
}

TEST_CASE("dhat kills q*eta and squares to zero; (dhat - d) is contact") {
  JetContext ctx = burgers_ctx();
  jct::ExprGen gen(113, jct::chart_atoms(ctx));
  for (int trial = 0; trial < 15; ++trial) {
    Expr q = gen.gen(3);
    CHECK(exactly_zero(reduced_horizontal_d(ctx, eta(ctx) * q)));
  }
  for (int trial = 0; trial < 40; ++trial) {
    DiffForm w = jct::random_form(gen, ctx, 2);
    CHECK(exactly_zero(reduced_horizontal_d(ctx, reduced_horizontal_d(ctx, w))));
    DiffForm diff = reduced_horizontal_d(ctx, w) - exterior_d(w);
    CHECK(exactly_zero(horizontal_projection(ctx, diff, DerivMode::Full)));
  }
}

TEST_CASE("Iglesias differential: square zero and the balance reading") {
  JetContext ctx = burgers_ctx();
  jct::ExprGen gen(131, jct::chart_atoms(ctx));
  for (int trial = 0; trial < 25; ++trial) {
    DiffForm alpha = jct::random_form(gen, ctx, 1).part(1);
    DiffForm beta = jct::random_form(gen, ctx, 2).part(2);
    MixedForm f{alpha, beta};
    MixedForm dd = iglesias_d(iglesias_d(f));
    CHECK(exactly_zero(dd.alpha));
    CHECK(exactly_zero(dd.beta));
  }
  // d~(0 + beta) = (beta, d beta)
  DiffForm beta = jct::random_form(gen, ctx, 2).part(2);
  MixedForm db = iglesias_d(MixedForm{DiffForm::zero(), beta});
  CHECK(exactly_equal(db.alpha, beta));
  CHECK(exactly_equal(db.beta, exterior_d(beta)));
  // d~(F + Pi) = 0 iff dF = Pi
  DiffForm F = jct::random_form(gen, ctx, 1).part(1);
  MixedForm balance{F, exterior_d(F)};
  MixedForm z = iglesias_d(balance);
  CHECK(exactly_zero(z.alpha));
  CHECK(exactly_zero(z.beta));
}

TEST_CASE("contact generators by context kind") {
  JetContext full = full_ctx_2d();
  auto gen_full = contact_generators(full);
  DiffForm expect = DiffForm::differential(full.fiber(0));
  expect.add(Monomial{{full.base(0)}}, -Expr::coord(full.jet1(0, 0)));
  expect.add(Monomial{{full.base(1)}}, -Expr::coord(full.jet1(1, 0)));
  CHECK(exactly_equal(gen_full[0], expect));

  JetContext ret = jct::ret_ctx(2);
  auto gen_ret = contact_generators(ret);
  CHECK(gen_ret.size() == 2);
  CHECK(exactly_equal(gen_ret[0], DiffForm::differential(ret.fiber(0))));

  JetContext bur = burgers_ctx();
  auto gen_b = contact_generators(bur);
  DiffForm wb = DiffForm::differential(bur.fiber(0));
  wb.add(Monomial{{bur.base(1)}}, -Expr::coord(bur.jet1(1, 0)));
  CHECK(exactly_equal(gen_b[0], wb));
}

TEST_CASE("vertical endomorphism reproduces Theta_L - L eta") {
  JetContext ctx = full_ctx_2d();
  Expr z0 = Expr::coord(ctx.jet1(0, 0));
  Expr L = z0 * z0 / Expr::num(2l);
  DiffForm dL;
  for (const Coordinate& c : free_coords(L))
    dL.add(Monomial{{c}}, differentiate(L, c));
  MixedForm s = vertical_endomorphism(ctx, dL);
  DiffForm want = eta(ctx) * (-(z0 * z0)) +
                  wedge(DiffForm::differential(ctx.fiber(0)), eta_mu(ctx, 0)) * z0;
  CHECK(exactly_equal(s.alpha, want));
  CHECK(s.beta.is_zero());
  CHECK(vertical_endomorphism(ctx, DiffForm::differential(ctx.base(0))).alpha.is_zero());
  DiffForm two = vertical_endomorphism(ctx, dL + dL).alpha;
  CHECK(exactly_equal(two, s.alpha + s.alpha));
  CHECK_THROWS_AS(vertical_endomorphism(burgers_ctx(), dL), ContextError);
}

TEST_CASE("pullback by a section annihilates contact forms and fixes eta") {
  JetContext fctx = full_ctx_2d();
  std::map<int, Expr> fs{{0, fctx.parse_expr("sin(x - t)")}};
  for (const DiffForm& w : contact_generators(fctx))
    CHECK(exactly_zero(pullback_section(fctx, w, fs)));
  JetContext ctx = burgers_ctx();
  std::map<int, Expr> s{{0, ctx.parse_expr("sin(x - t)")}};
  // partial contact forms vanish along the admitted directions only
  for (const DiffForm& w : contact_generators(ctx)) {
    DiffForm pulled = pullback_section(ctx, w, s);
    CHECK(expands_to_zero(pulled.coefficient(Monomial{{ctx.base(1)}})));
  }
  CHECK(exactly_equal(pullback_section(ctx, eta(ctx), s), eta(ctx)));
  std::map<int, Expr> cs{{0, Expr::num(2l)}};
  DiffForm flux = eta_mu(ctx, 0) * Expr::coord(ctx.fiber(0));
  DiffForm pulled = pullback_section(ctx, flux, cs);
  CHECK(exactly_zero(exterior_d(pulled)));
}

TEST_CASE("Cartan formula is consistent with Leibniz over wedge") {
  JetContext ctx = full_ctx_2d();
  jct::ExprGen gen(151, jct::chart_atoms(ctx));
  VectorField xi(ctx);
  xi.set(ctx.base(0), gen.gen(1));
  xi.set(ctx.fiber(0), gen.gen(2));
  for (int trial = 0; trial < 12; ++trial) {
    DiffForm a = jct::random_form(gen, ctx, 2).part(1);
    DiffForm b = jct::random_form(gen, ctx, 1);
    DiffForm lhs = lie_derivative(xi, wedge(a, b));
    DiffForm rhs = wedge(lie_derivative(xi, a), b) + wedge(a, lie_derivative(xi, b));
    CHECK(exactly_equal(lhs, rhs));
  }
}

TEST_CASE("wedge is graded-commutative and degree-additive") {
  JetContext ctx = full_ctx_2d();
  jct::ExprGen gen(171, jct::chart_atoms(ctx));
  for (int trial = 0; trial < 20; ++trial) {
    DiffForm a = jct::random_form(gen, ctx, 3).part(1 + (int)(gen.raw() % 2));
    DiffForm b = jct::random_form(gen, ctx, 3).part(1 + (int)(gen.raw() % 2));
    if (a.is_zero() || b.is_zero()) continue;
    int da = *a.degree(), db = *b.degree();
    DiffForm ab = wedge(a, b);
    if (!ab.is_zero()) CHECK(*ab.degree() == da + db);
    DiffForm ba = wedge(b, a);
    if ((da * db) % 2 == 1) ba = -ba;
    CHECK(exactly_equal(ab, ba));
  }
}
