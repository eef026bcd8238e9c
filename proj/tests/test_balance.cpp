#include <doctest.h>

#include "jetcartan/classify.hpp"
#include "test_helpers.hpp"

using namespace jc;
using jct::burgers_ctx;
using jct::full_ctx_2d;

namespace {

ConstitutiveRelation burgers_cr(const JetContext& ctx) {
  std::map<std::pair<int, int>, Expr> F;
  F[{0, 0}] = Expr::coord(ctx.fiber(0));
  F[{1, 0}] = ctx.parse_expr("y^2/2 - delta*d(y,x)");
  return ConstitutiveRelation::general(ctx, std::move(F), {Expr::zero()});
}

}  // namespace

TEST_CASE("Burgers residual") {
  JetContext ctx = burgers_ctx();
  BalanceSystem b = generate(burgers_cr(ctx));
  Expr want = ctx.parse_expr("d(y;t) + y*d(y,x) - delta*d(y,x,x)");
  CHECK(exactly_equal(b.residuals[0], want));
}

TEST_CASE("sine-Gordon residual is the honest jet-space expression") {
  JetContext ctx = burgers_ctx();
  std::map<std::pair<int, int>, Expr> F;
  F[{0, 0}] = Expr::coord(ctx.jet1(1, 0));
  F[{1, 0}] = ctx.parse_expr("cos(y)");
  ConstitutiveRelation cr = ConstitutiveRelation::general(ctx, std::move(F), {Expr::zero()});
  BalanceSystem b = generate(cr);
  Expr want = ctx.parse_expr("d(y,t,x) - sin(y)*d(y,x)");
  CHECK(exactly_equal(b.residuals[0], want));
  // pulled onto a generic section, it is exactly d_t(s_x) + d_x(cos s)
  Expr s = Expr::unknown("s", {Expr::coord(ctx.base(0)), Expr::coord(ctx.base(1))});
  std::map<int, Expr> sec{{0, s}};
  Expr pulled = pullback_section(ctx, b.residuals[0], sec);
  Expr section_form = differentiate(differentiate(s, ctx.base(1)), ctx.base(0)) +
                      differentiate(Expr::call(Builtin::Cos, s), ctx.base(1));
  CHECK(exactly_equal(pulled, section_form));
}

TEST_CASE("five-field mass law gives the continuity equation") {
  JetContext ctx = ContextBuilder()
                       .base({"t", "x1", "x2", "x3"})
                       .fields({"rho", "v1", "v2", "v3", "theta"})
                       .split("rho", SplitKind::S0)
                       .split("v1", SplitKind::Sx)
                       .split("v2", SplitKind::Sx)
                       .split("v3", SplitKind::Sx)
                       .split("theta", SplitKind::Sx)
                       .build();
  std::map<std::pair<int, int>, Expr> F;
  Expr rho = Expr::coord(ctx.fiber(0));
  F[{0, 0}] = rho;
  for (int a = 1; a <= 3; ++a) F[{a, 0}] = rho * Expr::coord(ctx.fiber(a));
  std::vector<Expr> Pi(5, Expr::zero());
  ConstitutiveRelation cr = ConstitutiveRelation::general(ctx, std::move(F), Pi);
  BalanceSystem b = generate(cr);
  Expr want = Expr::coord(ctx.jet(0, {0}));  // rho_{;t}
  for (int a = 1; a <= 3; ++a)
    want = want + Expr::coord(ctx.jet(0, {(std::int16_t)a})) * Expr::coord(ctx.fiber(a)) +
           rho * Expr::coord(ctx.jet1(a, a));
  CHECK(exactly_equal(b.residuals[0], want));
}

TEST_CASE("Euler-Lagrange: wave equation and jet-free Lagrangians") {
  JetContext ctx = full_ctx_2d();
  Expr z0 = Expr::coord(ctx.jet1(0, 0)), z1 = Expr::coord(ctx.jet1(1, 0));
  Expr L = (z0 * z0 - z1 * z1) / Expr::num(2l);
  BalanceSystem b = euler_lagrange(L, ctx);
  Expr want = Expr::coord(ctx.jet(0, {0, 0})) - Expr::coord(ctx.jet(0, {1, 1}));
  CHECK(exactly_equal(b.residuals[0], want));
  // jet-free L: residual is -L_y
  Expr y = Expr::coord(ctx.fiber(0));
  BalanceSystem b2 = euler_lagrange(y * y, ctx);
  CHECK(exactly_equal(b2.residuals[0], -(Expr::num(2l) * y)));
}

TEST_CASE("generate on a Lagrangian CR equals euler_lagrange exactly") {
  JetContext ctx = full_ctx_2d(2);
  jct::ExprGen gen(211, jct::chart_atoms(ctx));
  for (int trial = 0; trial < 20; ++trial) {
    Expr L = gen.gen(3);
    BalanceSystem via_cr = generate(ConstitutiveRelation::lagrangian(ctx, L));
    BalanceSystem via_el = euler_lagrange(L, ctx);
    for (int i = 0; i < 2; ++i)
      CHECK(expands_to_zero(via_cr.residuals[i] - via_el.residuals[i]));
  }
}

TEST_CASE("Div-equivalence and triviality with witness restrictions") {
  JetContext full = full_ctx_2d();
  Expr y = Expr::coord(full.fiber(0));
  // B = (q^mu eta_mu, d_mu q^mu eta) with q = (y^2, 0) is trivial on the full jet
  std::vector<Expr> q{y * y, Expr::zero()};
  Expr div = total_derivative(full, 0, q[0], DerivMode::Full);
  BalanceLaw b{full, q, div};
  auto rep = check_trivial(b, q);
  CHECK(rep.equivalent);
  CHECK(rep.violation.empty());
  // same witness on a RET chart is rejected: q cannot depend on y
  JetContext ret = jct::ret_ctx(1);
  Expr u = Expr::coord(ret.fiber(0));
  std::vector<Expr> qr{u * u, Expr::zero()};
  BalanceLaw br{ret, qr, Expr::zero()};
  auto rep2 = check_trivial(br, qr);
  CHECK(!rep2.equivalent);
  CHECK(rep2.violation.find("cannot depend on") != std::string::npos);
  // q = 0: equivalence iff the laws agree
  BalanceLaw b1{full, {y, Expr::zero()}, y};
  BalanceLaw b2 = b1;
  std::vector<Expr> zeroq{Expr::zero(), Expr::zero()};
  CHECK(check_div_equivalence(b1, b2, zeroq).equivalent);
  b2.source = y + Expr::one();
  CHECK(!check_div_equivalence(b1, b2, zeroq).equivalent);
}

TEST_CASE("verify_section: exact closed forms and genuine residuals") {
  JetContext ctx = burgers_ctx();
  // delta = 0, s = x/(1+t): residual vanishes identically
  BalanceSystem b = generate(burgers_cr(ctx));
  NumericSection s;
  s.closed_form[0] = ctx.parse_expr("x/(1 + t)");
  GridSpec grid{{0.0, -1.0}, {1.0, 1.0}, {8, 8}};
  auto rep = verify_section(b, s, grid, {{"delta", 0.0}});
  CHECK(rep.max_residual == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rep.stencil_error_estimate == 0.0);

  // wave equation with s = sin(x - t): exact in closed form
  JetContext full = full_ctx_2d();
  Expr z0 = Expr::coord(full.jet1(0, 0)), z1 = Expr::coord(full.jet1(1, 0));
  BalanceSystem wave = euler_lagrange((z0 * z0 - z1 * z1) / Expr::num(2l), full);
  NumericSection ws;
  ws.closed_form[0] = full.parse_expr("sin(x - t)");
  auto wrep = verify_section(wave, ws, grid);
  CHECK(wrep.max_residual == doctest::Approx(0.0).epsilon(1e-12));

  // a random section is reported with a visible residual
  NumericSection bad;
  bad.closed_form[0] = ctx.parse_expr("x^2 + t");
  auto brep = verify_section(b, bad, grid, {{"delta", 0.5}});
  CHECK(brep.max_residual > 0.5);
}

TEST_CASE("verify_section on sampled grids converges at stencil order") {
  JetContext full = full_ctx_2d();
  Expr z0 = Expr::coord(full.jet1(0, 0)), z1 = Expr::coord(full.jet1(1, 0));
  BalanceSystem wave = euler_lagrange((z0 * z0 - z1 * z1) / Expr::num(2l), full);
  // unequal spacings keep the t- and x-stencil errors from cancelling
  auto sample = [&](int nt, int nx) {
    NumericSection s;
    s.periodic = true;
    s.values.assign(1, std::vector<double>((size_t)nt * nx));
    double tau = 2 * M_PI;
    for (int it = 0; it < nt; ++it)
      for (int ix = 0; ix < nx; ++ix)
        s.values[0][(size_t)it * nx + ix] = std::sin(tau * ix / nx - tau * it / nt);
    return s;
  };
  GridSpec g32{{0.0, 0.0}, {2 * M_PI, 2 * M_PI}, {32, 16}};
  GridSpec g64{{0.0, 0.0}, {2 * M_PI, 2 * M_PI}, {64, 32}};
  double r32 = verify_section(wave, sample(32, 16), g32).max_residual;
  double r64 = verify_section(wave, sample(64, 32), g64).max_residual;
  CHECK(r32 < 0.2);
  CHECK(r64 < 0.3 * r32);  // O(h^2): quartering expected
}

TEST_CASE("classification: Burgers, mixed two-field, stationary") {
  JetContext ctx = burgers_ctx();
  TypeIndex t = classify(burgers_cr(ctx), {});
  CHECK(t.h == 0);
  CHECK(t.p == 1);
  CHECK(t.e == 0);

  // two fields: F^0_1 = y1_{;t} (time jet), F^0_2 = y2
  JetContext s = ContextBuilder()
                     .base({"t", "x"})
                     .fields({"y1", "y2"})
                     .split("y1", SplitKind::St)
                     .split("y2", SplitKind::S0)
                     .build();
  std::map<std::pair<int, int>, Expr> F;
  F[{0, 0}] = Expr::coord(s.jet1(0, 0));
  F[{0, 1}] = Expr::coord(s.fiber(1));
  ConstitutiveRelation cr2 =
      ConstitutiveRelation::general(s, std::move(F), {Expr::zero(), Expr::zero()});
  TypeIndex t2 = classify(cr2, {});
  CHECK(t2.h == 1);
  CHECK(t2.p == 1);
  CHECK(t2.e == 0);

  // F^0 = 0: everything stationary
  JetContext r = jct::ret_ctx(3);
  std::map<std::pair<int, int>, Expr> zf;
  ConstitutiveRelation cr3 = ConstitutiveRelation::ret(
      r, std::move(zf), {Expr::zero(), Expr::zero(), Expr::zero()});
  TypeIndex t3 = classify(cr3, {});
  CHECK(t3.h == 0);
  CHECK(t3.p == 0);
  CHECK(t3.e == 3);
  CHECK(t3.regularity_applicable);
  CHECK(!t3.regular);

  // the standing assumption is enforced
  std::map<std::pair<int, int>, Expr> bad;
  bad[{1, 0}] = Expr::coord(s.jet1(0, 0));
  ConstitutiveRelation crbad =
      ConstitutiveRelation::general(s, std::move(bad), {Expr::zero(), Expr::zero()});
  CHECK_THROWS_AS(classify(crbad, {}), ContextError);
}

TEST_CASE("h + p + e = m on random constitutive relations") {
  std::mt19937_64 rng(317);
  for (int trial = 0; trial < 30; ++trial) {
    JetContext s = ContextBuilder()
                       .base({"t", "x"})
                       .fields({"a", "b", "c"})
                       .split("a", SplitKind::St)
                       .split("b", SplitKind::Sx)
                       .split("c", SplitKind::Stx)
                       .build();
    jct::ExprGen gen(400 + trial, jct::base_fiber_atoms(s));
    std::map<std::pair<int, int>, Expr> F;
    for (int i = 0; i < 3; ++i) {
      Expr f = gen.gen(2);
      if (rng() % 2 && s.admitted(0, i))
        f = f + Expr::num((long)(rng() % 3)) * Expr::coord(s.jet1(0, i));
      F[{0, i}] = f;
    }
    ConstitutiveRelation cr = ConstitutiveRelation::general(
        s, std::move(F), {Expr::zero(), Expr::zero(), Expr::zero()});
    NumPoint pt;
    std::uniform_real_distribution<double> dist(-1, 1);
    for (int i = 0; i < 3; ++i) pt[s.fiber(i)] = dist(rng);
    TypeIndex t = classify(cr, pt);
    CHECK(t.h + t.p + t.e == 3);
    CHECK(t.p >= 0);
  }
}

TEST_CASE("Div-equivalent systems produce identical section residuals") {
  JetContext ctx = full_ctx_2d();
  Expr y = Expr::coord(ctx.fiber(0));
  std::map<std::pair<int, int>, Expr> F1, F2;
  F1[{0, 0}] = y;
  F1[{1, 0}] = y * y / Expr::num(2l);
  // witness q = (y^2, 0): F2 = F1 + q, Pi2 = Pi1 + d_mu q^mu
  std::vector<Expr> q{y * y, Expr::zero()};
  F2[{0, 0}] = F1[{0, 0}] + q[0];
  F2[{1, 0}] = F1[{1, 0}] + q[1];
  Expr divq = total_derivative(ctx, 0, q[0], DerivMode::Full) +
              total_derivative(ctx, 1, q[1], DerivMode::Full);
  ConstitutiveRelation c1 = ConstitutiveRelation::general(ctx, F1, {Expr::zero()});
  ConstitutiveRelation c2 = ConstitutiveRelation::general(ctx, F2, {divq});
  BalanceLaw b1{ctx, {c1.F(0, 0), c1.F(1, 0)}, c1.Pi(0)};
  BalanceLaw b2{ctx, {c2.F(0, 0), c2.F(1, 0)}, c2.Pi(0)};
  CHECK(check_div_equivalence(b1, b2, q).equivalent);
  // the generated residuals coincide symbolically, hence section reports match
  BalanceSystem s1 = generate(c1), s2 = generate(c2);
  CHECK(expands_to_zero(s1.residuals[0] - s2.residuals[0]));
  NumericSection s;
  s.closed_form[0] = ctx.parse_expr("sin(x - t)");
  GridSpec grid{{0.0, 0.0}, {1.0, 1.0}, {8, 8}};
  auto r1 = verify_section(s1, s, grid);
  auto r2 = verify_section(s2, s, grid);
  CHECK(r1.max_residual == doctest::Approx(r2.max_residual).epsilon(1e-12));
}

TEST_CASE("fourth-order stencils beat second-order on the same grid") {
  JetContext full = full_ctx_2d();
  Expr z0 = Expr::coord(full.jet1(0, 0)), z1 = Expr::coord(full.jet1(1, 0));
  BalanceSystem wave = euler_lagrange((z0 * z0 - z1 * z1) / Expr::num(2l), full);
  auto sample = [&](int nt, int nx, int order) {
    NumericSection s;
    s.periodic = true;
    s.stencil_order = order;
    s.values.assign(1, std::vector<double>((size_t)nt * nx));
    double tau = 2 * M_PI;
    for (int it = 0; it < nt; ++it)
      for (int ix = 0; ix < nx; ++ix)
        s.values[0][(size_t)it * nx + ix] = std::sin(tau * ix / nx - tau * it / nt);
    return s;
  };
  GridSpec g{{0.0, 0.0}, {2 * M_PI, 2 * M_PI}, {48, 24}};
  double second = verify_section(wave, sample(48, 24, 2), g).max_residual;
  double fourth = verify_section(wave, sample(48, 24, 4), g).max_residual;
  CHECK(fourth < 0.1 * second);
}
