#ifndef JETCARTAN_RET_HPP
#define JETCARTAN_RET_HPP

#include "jetcartan/balance.hpp"

namespace jc {

// RET data lives on jet-free charts: a primal one over the state fields u^i
// and a dual one over the Lagrange-Liu multipliers lam1..lamm.
JetContext ret_dual_context(int n1, int m, const std::vector<std::string>& base_names,
                            const std::vector<std::string>& params = {});

struct ConvexityReport {
  enum class Verdict { NegativeDefinite, Degenerate, WrongSign, Indefinite };
  Verdict verdict = Verdict::NegativeDefinite;
  int samples = 0;
  std::vector<NumPoint> violations;  // sample points failing negative definiteness
};

// lambda^i = d h0 / d u^i plus a sampled definiteness report for Hess(h0).
// The Hessian is probed at the caller's points (if any) plus random draws;
// sampling reports evidence, not proof.
struct LagrangeLiu {
  std::vector<Expr> lambda;
  ConvexityReport convexity;
};
LagrangeLiu lagrange_liu_map(const JetContext& primal, const Expr& h0, int samples = 64,
                             const ParamValues& params = {},
                             const std::vector<NumPoint>& user_points = {});

std::vector<std::vector<Expr>> ruppeiner_metric(const JetContext& primal, const Expr& h0);

struct LegendreInverse {
  std::vector<double> u;
  int iterations = 0;
};
// Newton iteration for lambda(u) = target to |residual| < 1e-12.
LegendreInverse invert_legendre(const JetContext& primal, const std::vector<Expr>& lambda_map,
                                const std::vector<double>& target,
                                const std::vector<double>& guess,
                                const ParamValues& params = {});

struct FourPotential {
  bool symbolic = false;
  std::vector<Expr> hhat;        // over the dual chart (symbolic path)
  bool identity_verified = false;  // h~ = -hhat + lambda d hhat holds
  std::string note;
};

// hhat^mu(lambda) = lambda^i F^mu_i(u) - h^mu(u) composed through the inverse
// change of variables; exact when the multiplier map is affine in u.
FourPotential four_potential(const JetContext& primal, const JetContext& dual,
                             const std::vector<Expr>& lambda_map,
                             const std::map<std::pair<int, int>, Expr>& F,
                             const std::vector<Expr>& h);

struct HolonomicityReport {
  bool holonomic = true;
  std::vector<std::pair<int, int>> witnesses;  // failing (mu, i)
  std::vector<std::pair<int, int>> probabilistic;  // matched only numerically
};
HolonomicityReport holonomicity_check(const JetContext& dual, const std::vector<Expr>& hhat,
                                      const std::map<std::pair<int, int>, Expr>& Ftilde);

struct ResidualInequalityReport {
  bool satisfied = true;
  double min_value = 0;
  std::optional<NumPoint> violator;
  int samples = 0;
};
ResidualInequalityReport residual_inequality(const JetContext& dual,
                                             const std::vector<Expr>& Pi, int samples = 1000,
                                             double radius = 2.0,
                                             const ParamValues& params = {});
// Production from a potential: Pi_i = d Psi / d lambda^i; the radial
// monotonicity zeta . Psi >= 0 then implies the inequality.
std::vector<Expr> production_from_potential(const JetContext& dual, const Expr& Psi);
ResidualInequalityReport radial_monotonicity(const JetContext& dual, const Expr& Psi,
                                             int samples = 1000, double radius = 2.0,
                                             const ParamValues& params = {});

// Dual balance system d_mu(d hhat^mu/d lambda^i) = Pi_i; coefficient matrices
// are Hessians of hhat and their symmetry is asserted on every output.
BalanceSystem dual_balance_system(const JetContext& dual, const std::vector<Expr>& hhat,
                                  const std::vector<Expr>& Pi);

}  // namespace jc

#endif
