#include <doctest.h>

#include "jetcartan/prolong.hpp"
#include "test_helpers.hpp"

using namespace jc;
using jct::burgers_ctx;
using jct::full_ctx_2d;

TEST_CASE("make_context accepts the worked charts and rejects bad specs") {
  JetContext bur = burgers_ctx();
  CHECK(bur.P() == std::set<std::pair<int, int>>{{1, 0}});
  JetContext ret = jct::ret_ctx(2);
  CHECK(ret.is_ret());
  CHECK_THROWS_AS(ContextBuilder().base({"t", "x"}).fields({"y", "y"}).build(), ContextError);
  CHECK_THROWS_AS(ContextBuilder().base({"t"}).fields({"t"}).build(), ContextError);
  // split-induced P
  JetContext s = ContextBuilder()
                     .base({"t", "x1", "x2"})
                     .fields({"a", "b", "c", "e"})
                     .split("a", SplitKind::S0)
                     .split("b", SplitKind::St)
                     .split("c", SplitKind::Sx)
                     .split("e", SplitKind::Stx)
                     .build();
  CHECK(!s.admitted(0, 0));
  CHECK(s.admitted(0, 1));
  CHECK(!s.admitted(1, 1));
  CHECK(s.admitted(1, 2));
  CHECK(!s.admitted(0, 2));
  CHECK(s.admitted(0, 3));
  CHECK(s.admitted(2, 3));
  // singular metric rejected
  JetContext f = full_ctx_2d();
  std::vector<std::vector<Expr>> g{{Expr::one(), Expr::one()}, {Expr::one(), Expr::one()}};
  CHECK_THROWS_AS(f.with_metric(g), ContextError);
}

TEST_CASE("prolongation of simple fields") {
  JetContext ctx = full_ctx_2d();
  // constant vertical field lifts to itself
  VectorField dy(ctx);
  dy.set(ctx.fiber(0), Expr::one());
  VectorField dy1 = prolong_vector_field(dy);
  CHECK(dy1.components().size() == 1);
  CHECK(struct_eq(dy1.component(ctx.fiber(0)), Expr::one()));

  // xi = x^1 d_{x^0} -> xi^1 = x^1 d_{x^0} - z_0 d_{z_1}
  VectorField xi(ctx);
  xi.set(ctx.base(0), Expr::coord(ctx.base(1)));
  VectorField x1 = prolong_vector_field(xi);
  CHECK(struct_eq(x1.component(ctx.jet1(1, 0)), -Expr::coord(ctx.jet1(0, 0))));
  CHECK(x1.component(ctx.jet1(0, 0)).is_zero());
}

TEST_CASE("K-partial liftability conditions") {
  JetContext ctx = burgers_ctx();
  // f(t) d_t is liftable (complementary leg depending on its own variable)
  VectorField ok(ctx);
  ok.set(ctx.base(0), Expr::call(Builtin::Exp, Expr::coord(ctx.base(0))));
  CHECK_NOTHROW(prolong_vector_field(ok));
  // x d_t is not: the complementary component leans on the admitted direction
  VectorField bad(ctx);
  bad.set(ctx.base(0), Expr::coord(ctx.base(1)));
  CHECK_THROWS_WITH_AS(prolong_vector_field(bad),
                       doctest::Contains("complementary component"), LiftError);
  // vertical component may not depend on the complementary direction
  VectorField badv(ctx);
  badv.set(ctx.fiber(0), Expr::coord(ctx.base(0)));
  CHECK_THROWS_AS(prolong_vector_field(badv), LiftError);
}

TEST_CASE("S-case component shape is enforced") {
  JetContext s = ContextBuilder()
                     .base({"t", "x"})
                     .fields({"a", "b"})
                     .split("a", SplitKind::St)
                     .split("b", SplitKind::Sx)
                     .build();
  VectorField ok(s);
  ok.set(s.fiber(0), Expr::coord(s.base(0)) * Expr::coord(s.fiber(0)));
  CHECK_NOTHROW(prolong_vector_field(ok));
  VectorField cross(s);
  cross.set(s.fiber(0), Expr::coord(s.fiber(1)));  // S_t component using an S_x field
  CHECK_THROWS_WITH_AS(prolong_vector_field(cross), doctest::Contains("S-class"), LiftError);
  VectorField badx(s);
  badx.set(s.fiber(1), Expr::coord(s.base(0)));  // S_x component depending on t
  CHECK_THROWS_AS(prolong_vector_field(badx), LiftError);
}

TEST_CASE("prolongation is a Lie-algebra homomorphism") {
  for (bool full : {true, false}) {
    JetContext ctx = full ? full_ctx_2d(2)
                          : ContextBuilder()
                                .base({"t", "x"})
                                .fields({"y1", "y2"})
                                .jet("x", "y1")
                                .jet("x", "y2")
                                .build();
    jct::ExprGen gen(full ? 3 : 4, {});
    for (int trial = 0; trial < 25; ++trial) {
      // projectable pair obeying the K conditions: base comps on admitted dirs
      auto mk = [&](std::uint64_t salt) {
        jct::ExprGen g2(salt, jct::base_fiber_atoms(ctx));
        VectorField v(ctx);
        Expr xs = Expr::coord(ctx.base(1));
        v.set(ctx.base(1), xs * xs * Expr::num((long)(g2.raw() % 3)));
        if (full) v.set(ctx.base(0), Expr::coord(ctx.base(0)) * Expr::num((long)(g2.raw() % 3)));
        v.set(ctx.fiber(0), g2.gen(2));
        v.set(ctx.fiber(1), g2.gen(2));
        if (!full) {
          // keep vertical components off the complementary direction t
          VectorField w(ctx);
          w.set(ctx.base(1), v.component(ctx.base(1)));
          Bindings kill{{ctx.base(0), Expr::zero()}};
          w.set(ctx.fiber(0), substitute(v.component(ctx.fiber(0)), kill));
          w.set(ctx.fiber(1), substitute(v.component(ctx.fiber(1)), kill));
          return w;
        }
        return v;
      };
      VectorField a = mk(trial * 2 + 1), b = mk(trial * 2 + 2);
      VectorField lhs = prolong_vector_field(bracket(a, b));
      VectorField rhs = bracket(prolong_vector_field(a), prolong_vector_field(b));
      for (auto& [c, e] : rhs.components()) CHECK(expands_to_zero(e - lhs.component(c)));
      for (auto& [c, e] : lhs.components()) CHECK(expands_to_zero(e - rhs.component(c)));
    }
  }
}

TEST_CASE("prolongation preserves the contact ideal with q^i_j = d xi^i / d y^j") {
  JetContext ctx = full_ctx_2d(2);
  jct::ExprGen gen(9, jct::base_fiber_atoms(ctx));
  VectorField xi(ctx);
  xi.set(ctx.base(0), Expr::coord(ctx.base(0)));
  xi.set(ctx.fiber(0), gen.gen(2));
  xi.set(ctx.fiber(1), gen.gen(2));
  VectorField xi1 = prolong_vector_field(xi);
  auto gens = contact_generators(ctx);
  for (int i = 0; i < 2; ++i) {
    DiffForm lhs = lie_derivative(xi1, gens[i]);
    DiffForm rhs;
    for (int j = 0; j < 2; ++j)
      rhs = rhs + gens[j] * differentiate(xi.component(ctx.fiber(i)), ctx.fiber(j));
    CHECK(exactly_equal(lhs, rhs));
  }
}

TEST_CASE("frame machinery: torsion of a holonomic frame vanishes") {
  JetContext ctx = full_ctx_2d();
  Frame holo = make_frame(ctx, {{Expr::one(), Expr::zero()}, {Expr::zero(), Expr::one()}});
  CHECK(holo.holonomic());
}

TEST_CASE("frame e0 = d_t, e1 = e^t d_x has the hand-computed torsion") {
  JetContext ctx = full_ctx_2d();
  Expr et = Expr::call(Builtin::Exp, Expr::coord(ctx.base(0)));
  Frame f = make_frame(ctx, {{Expr::one(), Expr::zero()}, {Expr::zero(), et}});
  CHECK(!f.holonomic());
  // d psi^1 = d(e^{-t} dx) = -e^{-t} dt ^ dx = -psi^0 ^ psi^1
  // so T^1_{01} = -1/2, antisymmetrized
  CHECK(exactly_equal(f.torsion[1][0][1], Expr::num(Rational(-1, 2))));
  CHECK(exactly_equal(f.torsion[1][1][0], Expr::num(Rational(1, 2))));
  // admissibility of xi = d_t for K = {1}: sigma = 0, nu = 1:
  // xi_0 . xbar^1 + 2 T^1_{beta 0} xbar^beta = 0 + 2*T^1_{00}*1 = 0 -> admissible
  CHECK_NOTHROW(prolong_in_frame(f, {Expr::one(), Expr::zero()},
                                 {Expr::zero()}, {1}));
  // xbar = (0, t): xi_0 . xbar^1 = 1 != 2*T^1_{0 0}*0 -> inadmissible
  CHECK_THROWS_AS(prolong_in_frame(f, {Expr::zero(), Expr::coord(ctx.base(0))},
                                   {Expr::zero()}, {1}),
                  LiftError);
}

TEST_CASE("torsion-free reduction: holonomic frame matches the K-partial lift") {
  JetContext ctx = burgers_ctx();
  Frame holo = make_frame(ctx, {{Expr::one(), Expr::zero()}, {Expr::zero(), Expr::one()}});
  jct::ExprGen gen(21, jct::base_fiber_atoms(ctx));
  for (int trial = 0; trial < 10; ++trial) {
    Expr xbar1 = Expr::coord(ctx.base(1)) * Expr::num((long)(gen.raw() % 3));
    Expr vert = substitute(gen.gen(2), Bindings{{ctx.base(0), Expr::zero()}});
    VectorField via_frame = prolong_in_frame(holo, {Expr::zero(), xbar1}, {vert}, {1});
    VectorField plain(ctx);
    plain.set(ctx.base(1), xbar1);
    plain.set(ctx.fiber(0), vert);
    VectorField via_k = prolong_vector_field(plain);
    for (auto& [c, e] : via_k.components())
      CHECK(expands_to_zero(e - via_frame.component(c)));
  }
}

TEST_CASE("momentum-bundle lift satisfies its defining Lie identity") {
  JetContext flat = full_ctx_2d(2);
  JetContext curved = flat.with_metric(
      {{Expr::one(), Expr::zero()},
       {Expr::zero(), Expr::call(Builtin::Exp, Expr::num(2l) * Expr::coord(flat.base(1)))}});
  int salt = 0;
  for (const JetContext& ctx : {flat, curved}) {
    for (int trial = 0; trial < 10; ++trial) {
      jct::ExprGen gen(500 + salt * 100 + trial, jct::base_fiber_atoms(ctx));
      VectorField xi(ctx);
      xi.set(ctx.base(0), Expr::coord(ctx.base(0)) * Expr::num((long)(gen.raw() % 3)));
      xi.set(ctx.base(1), Expr::coord(ctx.base(1)) * Expr::num((long)(gen.raw() % 3)));
      xi.set(ctx.fiber(0), gen.gen(2));
      xi.set(ctx.fiber(1), gen.gen(2));
      std::vector<Expr> alpha{gen.gen(2), gen.gen(2)};
      VectorField lift = lift_to_momentum_bundle(xi, alpha);
      DiffForm theta = canonical_theta_n1(ctx);
      DiffForm lhs = lie_derivative(lift, theta);
      DiffForm dalpha = exterior_d(eta_mu(ctx, 0) * alpha[0] + eta_mu(ctx, 1) * alpha[1]);
      CHECK(exactly_zero(lhs + dalpha));
    }
    ++salt;
  }
}

TEST_CASE("momentum lift spec cases: vertical constant and euclidean") {
  JetContext ctx = full_ctx_2d(2);
  VectorField xi(ctx);
  xi.set(ctx.fiber(0), Expr::one());
  VectorField lift = lift_to_momentum_bundle(xi, {Expr::zero(), Expr::zero()});
  for (int mu = 0; mu < 2; ++mu)
    for (int i = 0; i < 2; ++i) CHECK(lift.component(ctx.momentum(mu, i)).is_zero());
  CHECK(lift.component(ctx.momentum_scalar()).is_zero());
}

TEST_CASE("source-bundle lift leaves p_i dy^i ^ eta invariant") {
  JetContext flat = full_ctx_2d(2);
  JetContext curved = flat.with_metric(
      {{Expr::call(Builtin::Exp, Expr::num(2l) * Expr::coord(flat.base(0))), Expr::zero()},
       {Expr::zero(), Expr::one()}});
  int salt = 0;
  for (const JetContext& ctx : {flat, curved}) {
    for (int trial = 0; trial < 10; ++trial) {
      jct::ExprGen gen(900 + 100 * salt + trial, jct::base_fiber_atoms(ctx));
      VectorField xi(ctx);
      xi.set(ctx.base(0), Expr::coord(ctx.base(0)) * Expr::num((long)(gen.raw() % 3)));
      xi.set(ctx.base(1), Expr::coord(ctx.base(1)) * Expr::num((long)(gen.raw() % 3)));
      xi.set(ctx.fiber(0), gen.gen(2));
      xi.set(ctx.fiber(1), gen.gen(2));
      VectorField lift = lift_to_source_bundle(xi);
      CHECK(exactly_zero(lie_derivative(lift, canonical_source_form(ctx))));
    }
    ++salt;
  }
  // spec cases
  VectorField dt(flat);
  dt.set(flat.base(0), Expr::one());
  VectorField l1 = lift_to_source_bundle(dt);
  CHECK(l1.component(flat.source(0)).is_zero());
  CHECK(l1.component(flat.source(1)).is_zero());
  VectorField scale(flat);
  scale.set(flat.fiber(0), Expr::coord(flat.fiber(0)));
  VectorField l2 = lift_to_source_bundle(scale);
  CHECK(exactly_equal(l2.component(flat.source(0)), -Expr::coord(flat.source(0))));
}

TEST_CASE("connection prolongation: flat cases and constant L") {
  JetContext ctx = full_ctx_2d();
  Connection flatc = Connection::flat(ctx);
  Christoffel flatg = Christoffel::flat(ctx);
  auto lifts = prolong_connection(flatc, flatg);
  for (int lam = 0; lam < 2; ++lam) {
    CHECK(lifts[lam].components().size() == 1);
    CHECK(struct_eq(lifts[lam].component(ctx.base(lam)), Expr::one()));
  }
  // constant L with nonzero Christoffels: z-component Gamma^nu_{lam mu}(z^i_nu - L^i_nu)
  Connection cst = Connection::flat(ctx);
  cst.gamma[0][0] = Expr::num(3l);
  Christoffel g = Christoffel::flat(ctx);
  Expr x1 = Expr::coord(ctx.base(1));
  g.gamma[0][0][0] = x1;  // Gamma^0_{00} = x
  g.gamma[1][0][1] = x1;  // Gamma^1_{01} = x, symmetric partner set below
  g.gamma[1][1][0] = x1;
  auto lifts2 = prolong_connection(cst, g);
  Expr z0 = Expr::coord(ctx.jet1(0, 0)), z1 = Expr::coord(ctx.jet1(1, 0));
  // lift of d_{x^0}: z-comp at z_0 is Gamma^0_{00}(z_0 - 3) + Gamma^1_{00}(z_1 - 0)
  CHECK(exactly_equal(lifts2[0].component(ctx.jet1(0, 0)), x1 * (z0 - Expr::num(3l))));
  // and at z_1: Gamma^nu_{01}(z_nu - L_nu) = x*(z_1)
  CHECK(exactly_equal(lifts2[0].component(ctx.jet1(1, 0)), x1 * z1));
  // asymmetric Christoffel rejected
  Christoffel bad = Christoffel::flat(ctx);
  bad.gamma[0][0][1] = x1;
  CHECK_THROWS_AS(prolong_connection(cst, bad), LiftError);
}
