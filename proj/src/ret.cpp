#include "jetcartan/ret.hpp"

#include <Eigen/Dense>

#include <random>

namespace jc {

JetContext ret_dual_context(int n1, int m, const std::vector<std::string>& base_names,
                            const std::vector<std::string>& params) {
  std::vector<std::string> fields;
  for (int i = 0; i < m; ++i) fields.push_back("lam" + std::to_string(i + 1));
  ContextBuilder b;
  std::vector<std::string> bn = base_names;
  if ((int)bn.size() != n1) throw ContextError("dual context needs n+1 base names");
  b.base(bn).fields(fields);
  if (!params.empty()) b.params(params);
  return b.build();
}

namespace {

void jet_free(const JetContext& ctx, const Expr& e, const char* what) {
  (void)ctx;
  for (const Coordinate& c : free_coords(e))
    if (c.role == Role::Jet)
      throw ContextError(std::string(what) + " must be jet-free on a RET chart");
}

}  // namespace

LagrangeLiu lagrange_liu_map(const JetContext& primal, const Expr& h0, int samples,
                             const ParamValues& params,
                             const std::vector<NumPoint>& user_points) {
  jet_free(primal, h0, "entropy density");
  LagrangeLiu out;
  int m = primal.m();
  for (int i = 0; i < m; ++i) out.lambda.push_back(differentiate(h0, primal.fiber(i)));
  std::vector<std::vector<Expr>> hess(m, std::vector<Expr>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) hess[i][j] = differentiate(out.lambda[i], primal.fiber(j));
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  int total = samples + (int)user_points.size();
  out.convexity.samples = total;
  int neg = 0, pos = 0, degen = 0;
  for (int s = 0; s < total; ++s) {
    NumPoint pt;
    for (int mu = 0; mu < primal.n1(); ++mu) pt[primal.base(mu)] = dist(rng);
    for (int i = 0; i < m; ++i) pt[primal.fiber(i)] = dist(rng);
    if (s < (int)user_points.size())
      for (auto& [c, v] : user_points[s]) pt[c] = v;
    Eigen::MatrixXd H(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) H(i, j) = evaluate(hess[i][j], pt, params);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (H + H.transpose()));
    double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
    const double tol = 1e-12;
    if (hi < -tol) {
      ++neg;
    } else if (std::abs(lo) <= tol && std::abs(hi) <= tol) {
      ++degen;
      out.convexity.violations.push_back(pt);
    } else if (lo > tol) {
      ++pos;
      out.convexity.violations.push_back(pt);
    } else {
      out.convexity.violations.push_back(pt);
    }
  }
  using V = ConvexityReport::Verdict;
  if (neg == total) out.convexity.verdict = V::NegativeDefinite;
  else if (degen == total) out.convexity.verdict = V::Degenerate;
  else if (pos == total) out.convexity.verdict = V::WrongSign;
  else out.convexity.verdict = V::Indefinite;
  return out;
}

std::vector<std::vector<Expr>> ruppeiner_metric(const JetContext& primal, const Expr& h0) {
  int m = primal.m();
  std::vector<std::vector<Expr>> g(m, std::vector<Expr>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      g[i][j] = -differentiate(differentiate(h0, primal.fiber(i)), primal.fiber(j));
  return g;
}

LegendreInverse invert_legendre(const JetContext& primal, const std::vector<Expr>& lambda_map,
                                const std::vector<double>& target,
                                const std::vector<double>& guess, const ParamValues& params) {
  int m = primal.m();
  if ((int)lambda_map.size() != m || (int)target.size() != m || (int)guess.size() != m)
    throw ContextError("invert_legendre: dimension mismatch");
  std::vector<std::vector<Expr>> jac(m, std::vector<Expr>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) jac[i][j] = differentiate(lambda_map[i], primal.fiber(j));
  LegendreInverse out;
  out.u = guess;
  for (out.iterations = 1; out.iterations <= 100; ++out.iterations) {
    NumPoint pt;
    for (int i = 0; i < m; ++i) pt[primal.fiber(i)] = out.u[i];
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i) r(i) = evaluate(lambda_map[i], pt, params) - target[i];
    if (r.lpNorm<Eigen::Infinity>() < 1e-12) return out;
    Eigen::MatrixXd J(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) J(i, j) = evaluate(jac[i][j], pt, params);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible())
      throw ContextError("invert_legendre: singular Jacobian (definiteness fails here)");
    Eigen::VectorXd step = lu.solve(r);
    for (int i = 0; i < m; ++i) out.u[i] -= step(i);
  }
  throw ContextError("invert_legendre: no convergence within 100 iterations");
}

FourPotential four_potential(const JetContext& primal, const JetContext& dual,
                             const std::vector<Expr>& lambda_map,
                             const std::map<std::pair<int, int>, Expr>& F,
                             const std::vector<Expr>& h) {
  int m = primal.m(), n1 = primal.n1();
  if (dual.m() != m || dual.n1() != n1)
    throw ContextError("four_potential: primal and dual charts disagree");
  FourPotential out;
  // affine in u with u-free coefficients?
  bool affine = true;
  std::vector<std::vector<Expr>> A(m, std::vector<Expr>(m));
  std::vector<Expr> b(m);
  for (int i = 0; i < m && affine; ++i) {
    Bindings zero_u;
    for (int j = 0; j < m; ++j) zero_u[primal.fiber(j)] = Expr::zero();
    b[i] = substitute(lambda_map[i], zero_u);
    for (int j = 0; j < m && affine; ++j) {
      A[i][j] = differentiate(lambda_map[i], primal.fiber(j));
      for (const Coordinate& c : free_coords(A[i][j]))
        if (c.role == Role::Fiber) affine = false;
    }
  }
  if (!affine) {
    out.note = "multiplier map is not affine in u; no closed-form inverse";
    return out;
  }
  // u = A^{-1}(lambda - b), assembled over the dual chart
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
  Expr D = det(A);
  if (equivalent(D, Expr::zero()) != Equivalence::NotEqual)
    throw ContextError("four_potential: multiplier map is not invertible");
  std::vector<Expr> u_of_lambda(m, Expr::zero());
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      // cofactor expansion of A^{-1}
      std::vector<std::vector<Expr>> minor;
      for (int r = 0; r < m; ++r) {
        if (r == j) continue;
        std::vector<Expr> row;
        for (int c = 0; c < m; ++c)
          if (c != i) row.push_back(A[r][c]);
        minor.push_back(std::move(row));
      }
      Expr cof = minor.empty() ? Expr::one() : det(minor);
      if ((i + j) % 2 == 1) cof = -cof;
      u_of_lambda[i] =
          u_of_lambda[i] + (cof / D) * (Expr::coord(dual.fiber(j)) - b[j]);
    }
  }
  Bindings to_dual;
  for (int i = 0; i < m; ++i) to_dual[primal.fiber(i)] = u_of_lambda[i];
  out.symbolic = true;
  for (int mu = 0; mu < n1; ++mu) {
    Expr acc = -h[mu];
    for (int i = 0; i < m; ++i) {
      auto it = F.find({mu, i});
      if (it != F.end()) acc = acc + lambda_map[i] * it->second;
    }
    out.hhat.push_back(substitute(acc, to_dual));
  }
  // Legendre-shape identity: h~(lambda) = -hhat + lambda^i d hhat / d lambda^i
  out.identity_verified = true;
  for (int mu = 0; mu < n1; ++mu) {
    Expr rec = -out.hhat[mu];
    for (int i = 0; i < m; ++i)
      rec = rec + Expr::coord(dual.fiber(i)) * differentiate(out.hhat[mu], dual.fiber(i));
    if (!expands_to_zero(rec - substitute(h[mu], to_dual))) out.identity_verified = false;
  }
  return out;
}

HolonomicityReport holonomicity_check(const JetContext& dual, const std::vector<Expr>& hhat,
                                      const std::map<std::pair<int, int>, Expr>& Ftilde) {
  HolonomicityReport rep;
  for (int mu = 0; mu < dual.n1(); ++mu)
    for (int i = 0; i < dual.m(); ++i) {
      auto it = Ftilde.find({mu, i});
      Expr f = it == Ftilde.end() ? Expr::zero() : it->second;
      Expr diff = f - differentiate(hhat[mu], dual.fiber(i));
      if (expands_to_zero(diff)) continue;
      if (equivalent(diff, Expr::zero()) == Equivalence::ProbablyEqual) {
        rep.probabilistic.emplace_back(mu, i);
        continue;
      }
      rep.holonomic = false;
      rep.witnesses.emplace_back(mu, i);
    }
  return rep;
}

namespace {

ResidualInequalityReport sample_min(const JetContext& dual, const Expr& sigma, int samples,
                                    double radius, const ParamValues& params) {
  ResidualInequalityReport rep;
  rep.samples = samples;
  rep.min_value = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(0xd11a);
  std::uniform_real_distribution<double> dist(-radius, radius);
  for (int s = 0; s < samples; ++s) {
    NumPoint pt;
    for (int mu = 0; mu < dual.n1(); ++mu) pt[dual.base(mu)] = dist(rng);
    for (int i = 0; i < dual.m(); ++i) pt[dual.fiber(i)] = dist(rng);
    double v = evaluate(sigma, pt, params);
    if (v < rep.min_value) rep.min_value = v;
    if (v < -1e-12 && !rep.violator) {
      rep.violator = pt;
      rep.satisfied = false;
    }
  }
  return rep;
}

}  // namespace

ResidualInequalityReport residual_inequality(const JetContext& dual,
                                             const std::vector<Expr>& Pi, int samples,
                                             double radius, const ParamValues& params) {
  Expr sigma = Expr::zero();
  for (int i = 0; i < dual.m(); ++i)
    sigma = sigma + Expr::coord(dual.fiber(i)) * Pi[i];
  return sample_min(dual, sigma, samples, radius, params);
}

std::vector<Expr> production_from_potential(const JetContext& dual, const Expr& Psi) {
  std::vector<Expr> out;
  for (int i = 0; i < dual.m(); ++i) out.push_back(differentiate(Psi, dual.fiber(i)));
  return out;
}

ResidualInequalityReport radial_monotonicity(const JetContext& dual, const Expr& Psi,
                                             int samples, double radius,
                                             const ParamValues& params) {
  Expr zeta = Expr::zero();
  for (int i = 0; i < dual.m(); ++i)
    zeta = zeta + Expr::coord(dual.fiber(i)) * differentiate(Psi, dual.fiber(i));
  return sample_min(dual, zeta, samples, radius, params);
}

BalanceSystem dual_balance_system(const JetContext& dual, const std::vector<Expr>& hhat,
                                  const std::vector<Expr>& Pi) {
  if ((int)hhat.size() != dual.n1())
    throw ContextError("dual balance system needs n+1 potentials hhat^mu");
  for (const Expr& e : hhat) jet_free(dual, e, "four-potential");
  std::map<std::pair<int, int>, Expr> F;
  for (int mu = 0; mu < dual.n1(); ++mu)
    for (int i = 0; i < dual.m(); ++i) {
      Expr f = differentiate(hhat[mu], dual.fiber(i));
      if (!f.is_zero()) F[{mu, i}] = f;
    }
  // the coefficient matrices are Hessians: symmetric by construction, checked
  for (int mu = 0; mu < dual.n1(); ++mu)
    for (int i = 0; i < dual.m(); ++i)
      for (int j = 0; j < dual.m(); ++j) {
        Expr a = differentiate(differentiate(hhat[mu], dual.fiber(i)), dual.fiber(j));
        Expr b = differentiate(differentiate(hhat[mu], dual.fiber(j)), dual.fiber(i));
        if (!expands_to_zero(a - b))
          throw ContextError("internal: dual coefficient matrix lost its symmetry");
      }
  ConstitutiveRelation cr = ConstitutiveRelation::ret(dual, std::move(F), Pi);
  BalanceSystem out = generate(cr);
  out.provenance = "dual (Lagrange-Liu) system";
  return out;
}

}  // namespace jc
