#ifndef JETCARTAN_BALANCE_HPP
#define JETCARTAN_BALANCE_HPP

#include "jetcartan/constitutive.hpp"

namespace jc {

// Second-order PDE residuals d_mu F^mu_i + F^mu_i lambda_{G,mu} - Pi_i.
struct BalanceSystem {
  JetContext ctx;
  std::vector<Expr> residuals;  // one per field
  std::string provenance;
};

// A single balance law F^mu eta_mu + Pi eta, the carrier of Div-equivalence.
struct BalanceLaw {
  JetContext ctx;
  std::vector<Expr> flux;  // per base direction
  Expr source;
};

// Builds the residuals directly and asserts the independent
// reduced-horizontal route produces the same forms.
BalanceSystem generate(const ConstitutiveRelation& cr);
BalanceSystem euler_lagrange(const Expr& L, const JetContext& ctx);

struct DivEquivalenceReport {
  bool equivalent = false;
  std::string violation;  // which restriction fired, if any
};

// B2 - B1 = q^mu eta_mu + (d_mu q^mu) eta with the per-chart restrictions on q.
DivEquivalenceReport check_div_equivalence(const BalanceLaw& b1, const BalanceLaw& b2,
                                           const std::vector<Expr>& q);
inline DivEquivalenceReport check_trivial(const BalanceLaw& b, const std::vector<Expr>& q) {
  BalanceLaw zero{b.ctx, std::vector<Expr>(b.ctx.n1(), Expr::zero()), Expr::zero()};
  return check_div_equivalence(zero, b, q);
}

// Closed-form or sampled-grid section for numeric verification.
struct NumericSection {
  std::map<int, Expr> closed_form;         // field -> expression over base coords
  // grid data: values[field][node], row-major over the grid
  std::vector<std::vector<double>> values;
  bool periodic = true;                    // ghost policy: periodic or one-sided
  int stencil_order = 2;                   // 2 or 4 (central differences)
  bool is_closed_form() const { return !closed_form.empty(); }
};

struct GridSpec {
  std::vector<double> lo, hi;  // per base direction
  std::vector<int> n;          // nodes per direction (>= 8)
};

struct SectionReport {
  double max_residual = 0;
  std::vector<double> l2_residual;  // per equation
  double stencil_error_estimate = 0;
};

SectionReport verify_section(const BalanceSystem& b, const NumericSection& s,
                             const GridSpec& grid, const ParamValues& params = {});

}  // namespace jc

#endif
