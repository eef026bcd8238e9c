#include <doctest.h>

#include "jetcartan/ret.hpp"
#include "test_helpers.hpp"

using namespace jc;

namespace {

JetContext primal2() { return jct::ret_ctx(2); }
JetContext dual2() { return ret_dual_context(2, 2, {"t", "x"}); }

}  // namespace

TEST_CASE("Lagrange-Liu multipliers and convexity verdicts") {
  JetContext p = primal2();
  Expr u1 = Expr::coord(p.fiber(0)), u2 = Expr::coord(p.fiber(1));
  Expr h0 = -(u1 * u1 + u2 * u2) / Expr::num(2l);
  LagrangeLiu ll = lagrange_liu_map(p, h0);
  CHECK(exactly_equal(ll.lambda[0], -u1));
  CHECK(exactly_equal(ll.lambda[1], -u2));
  CHECK(ll.convexity.verdict == ConvexityReport::Verdict::NegativeDefinite);

  LagrangeLiu lin = lagrange_liu_map(p, u1 + u2);
  CHECK(lin.convexity.verdict == ConvexityReport::Verdict::Degenerate);

  LagrangeLiu wrong = lagrange_liu_map(p, (u1 * u1 + u2 * u2) / Expr::num(2l));
  CHECK(wrong.convexity.verdict == ConvexityReport::Verdict::WrongSign);
}

TEST_CASE("Ruppeiner metric") {
  JetContext p = primal2();
  Expr u1 = Expr::coord(p.fiber(0)), u2 = Expr::coord(p.fiber(1));
  auto g = ruppeiner_metric(p, -(u1 * u1 + u2 * u2) / Expr::num(2l));
  CHECK(exactly_equal(g[0][0], Expr::one()));
  CHECK(exactly_equal(g[1][1], Expr::one()));
  CHECK(g[0][1].is_zero());
  // symmetry on a generic density
  Expr h0 = -(u1 * u1 * u2 * u2 + u1 * u1 + u2 * u2);
  auto g2 = ruppeiner_metric(p, h0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(exactly_equal(g2[i][j], g2[j][i]));
  // linear density degenerates to zero
  auto g3 = ruppeiner_metric(p, u1 - u2);
  for (auto& row : g3)
    for (auto& e : row) CHECK(e.is_zero());
}

TEST_CASE("Legendre inversion by Newton") {
  JetContext p = primal2();
  Expr u1 = Expr::coord(p.fiber(0)), u2 = Expr::coord(p.fiber(1));
  // quadratic density: one-step convergence, u = -target
  LagrangeLiu ll = lagrange_liu_map(p, -(u1 * u1 + u2 * u2) / Expr::num(2l));
  LegendreInverse inv = invert_legendre(p, ll.lambda, {0.3, -0.7}, {0.0, 0.0});
  CHECK(inv.u[0] == doctest::Approx(-0.3));
  CHECK(inv.u[1] == doctest::Approx(0.7));
  CHECK(inv.iterations <= 2);

  // strictly definite quartic: round-trip within 1e-10 on random points
  Expr quart = -(u1 * u1 + u2 * u2) / Expr::num(2l) -
               (u1 * u1 * u1 * u1 + u2 * u2 * u2 * u2) / Expr::num(4l);
  LagrangeLiu llq = lagrange_liu_map(p, quart);
  CHECK(llq.convexity.verdict == ConvexityReport::Verdict::NegativeDefinite);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-1.2, 1.2);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> u{dist(rng), dist(rng)};
    NumPoint pt{{p.fiber(0), u[0]}, {p.fiber(1), u[1]}};
    std::vector<double> lam{evaluate(llq.lambda[0], pt), evaluate(llq.lambda[1], pt)};
    LegendreInverse back = invert_legendre(p, llq.lambda, lam, {0.0, 0.0});
    CHECK(std::abs(back.u[0] - u[0]) < 1e-10);
    CHECK(std::abs(back.u[1] - u[1]) < 1e-10);
  }

  // an indefinite map hits a singular Jacobian or fails to converge
  Expr bad = u1 * u1 * u2;
  LagrangeLiu llb = lagrange_liu_map(p, bad);
  CHECK_THROWS_AS(invert_legendre(p, llb.lambda, {0.5, 0.5}, {0.0, 0.0}), ContextError);
}

TEST_CASE("four-potential: symbolic linear case with the Legendre-shape identity") {
  JetContext p = primal2();
  JetContext d = dual2();
  Expr u1 = Expr::coord(p.fiber(0)), u2 = Expr::coord(p.fiber(1));
  LagrangeLiu ll = lagrange_liu_map(p, -(u1 * u1 + u2 * u2) / Expr::num(2l));
  // data compatible with the entropy relations d h^mu/d u = lambda . d F^mu/d u
  std::map<std::pair<int, int>, Expr> F;
  F[{0, 0}] = u1;
  F[{0, 1}] = u2;
  F[{1, 0}] = u2;
  F[{1, 1}] = u1;
  std::vector<Expr> h{-(u1 * u1 + u2 * u2) / Expr::num(2l), -(u1 * u2)};
  FourPotential fp = four_potential(p, d, ll.lambda, F, h);
  REQUIRE(fp.symbolic);
  CHECK(fp.identity_verified);
  // hhat^0 = lambda . F^0 - h^0 with u = -lambda: -(|lambda|^2)/2
  Expr l1 = Expr::coord(d.fiber(0)), l2 = Expr::coord(d.fiber(1));
  CHECK(exactly_equal(fp.hhat[0], -((l1 * l1 + l2 * l2) / Expr::num(2l))));
  CHECK(exactly_equal(fp.hhat[1], -(l1 * l2)));
  // incompatible source data is constructed but flagged unverified
  std::vector<Expr> hbad{h[0], u1 * u2};
  FourPotential fbad = four_potential(p, d, ll.lambda, F, hbad);
  CHECK(fbad.symbolic);
  CHECK(!fbad.identity_verified);
  // zero data gives the zero potential
  std::map<std::pair<int, int>, Expr> zf;
  std::vector<Expr> zh{Expr::zero(), Expr::zero()};
  FourPotential zfp = four_potential(p, d, ll.lambda, zf, zh);
  for (const Expr& e : zfp.hhat) CHECK(e.is_zero());
  // non-affine multiplier map: no symbolic inverse
  LagrangeLiu cubic = lagrange_liu_map(p, -(u1 * u1 * u1 * u1));
  FourPotential nfp = four_potential(p, d, cubic.lambda, F, h);
  CHECK(!nfp.symbolic);
}

TEST_CASE("holonomicity: construction passes, perturbation fails with witness") {
  JetContext d = dual2();
  Expr l1 = Expr::coord(d.fiber(0)), l2 = Expr::coord(d.fiber(1));
  std::vector<Expr> hhat{(l1 * l1 + l2 * l2) / Expr::num(2l),
                         l1 * l1 * l1 / Expr::num(3l) + l2 * l2};
  std::map<std::pair<int, int>, Expr> F;
  for (int mu = 0; mu < 2; ++mu)
    for (int i = 0; i < 2; ++i) F[{mu, i}] = differentiate(hhat[mu], d.fiber(i));
  CHECK(holonomicity_check(d, hhat, F).holonomic);
  F[{1, 0}] = F[{1, 0}] + l1;
  auto rep = holonomicity_check(d, hhat, F);
  CHECK(!rep.holonomic);
  REQUIRE(rep.witnesses.size() == 1);
  CHECK(rep.witnesses[0] == std::pair<int, int>{1, 0});
}

TEST_CASE("residual inequality sampling and the potential route") {
  JetContext d = dual2();
  Expr l1 = Expr::coord(d.fiber(0)), l2 = Expr::coord(d.fiber(1));
  // Pi = lambda: Sigma = |lambda|^2 >= 0
  auto ok = residual_inequality(d, {l1, l2});
  CHECK(ok.satisfied);
  CHECK(ok.min_value >= -1e-12);
  // Pi from Psi = |lambda|^4/4
  Expr psi = Expr::pow(l1 * l1 + l2 * l2, Rational(2)) / Expr::num(4l);
  auto viaPsi = residual_inequality(d, production_from_potential(d, psi));
  CHECK(viaPsi.satisfied);
  CHECK(radial_monotonicity(d, psi).satisfied);
  // Pi_1 = -lambda^1 violates at lambda != 0
  JetContext d1 = ret_dual_context(2, 1, {"t", "x"});
  auto badrep = residual_inequality(d1, {-Expr::coord(d1.fiber(0))});
  CHECK(!badrep.satisfied);
  CHECK(badrep.violator.has_value());
}

TEST_CASE("dual balance system") {
  JetContext d = ret_dual_context(2, 1, {"t", "x"});
  Expr l = Expr::coord(d.fiber(0));
  std::vector<Expr> hhat{l * l / Expr::num(2l), l * l * l / Expr::num(3l)};
  BalanceSystem b = dual_balance_system(d, hhat, {l});
  Expr want = Expr::coord(d.jet(0, {0})) +
              Expr::num(2l) * l * Expr::coord(d.jet(0, {1})) - l;
  CHECK(exactly_equal(b.residuals[0], want));
  // hhat linear in lambda: constant flux, residual is -Pi
  std::vector<Expr> lin{l, l};
  BalanceSystem b2 = dual_balance_system(d, lin, {l * l});
  CHECK(exactly_equal(b2.residuals[0], -(l * l)));
}
