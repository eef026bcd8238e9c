#ifndef JETCARTAN_NOETHER_HPP
#define JETCARTAN_NOETHER_HPP

#include "jetcartan/balance.hpp"

namespace jc {

// FDiv(xi) = sum F^mu_i d_mu xi^i over all directions (full-mode total
// derivative); xi must be vertical on Y.
Expr fdiv(const ConstitutiveRelation& cr, const VectorField& xi);
// Algebraic form for P-vertical fields given directly on Z_p:
// sum_{(mu,i) in P} xi^i_mu F^mu_i.
Expr fdiv_algebraic(const ConstitutiveRelation& cr, const VectorField& xi);

// One determining equation: a jet-free expression whose vanishing is the
// coefficient condition of the named jet monomial.
struct DeterminingEquation {
  Expr equation;
  std::string monomial;  // "1" for the jet-free part
};

struct DeterminingSystem {
  std::vector<DeterminingEquation> equations;
  bool all_zero() const;
};

enum class AdmissibilityPath {
  Full,        // FDiv over all directions (RET and full charts)
  PRestricted  // sum over admitted pairs only (partial-chart treatment)
};

// Splits the admissibility condition for a jet-free vertical ansatz into
// jet-monomial coefficients.
DeterminingSystem admissibility_system(const ConstitutiveRelation& cr, const VectorField& xi,
                                       AdmissibilityPath path = AdmissibilityPath::Full);

// The first-order symmetry determining equations (flux and source families),
// split by jet monomials.
DeterminingSystem symmetry_system(const ConstitutiveRelation& cr, const VectorField& xi);

enum class SymmetryClass { Variational, Noether, Cartan, None };

struct SymmetryVerdict {
  SymmetryClass cls = SymmetryClass::None;
  std::string detail;
};

// Tests h0(L_{xi^1} Theta^{n+1}) against 0 (variational) or dhat-exactness of
// a supplied alpha (Noether), plus invariance of the source part. Fields
// already living on Z_p (with jet components) are tested as Cartan symmetries.
SymmetryVerdict classify_symmetry(const CoveringCR& ccr, const VectorField& xi,
                                  const DiffForm* alpha = nullptr);

// Multimomentum current i_{xi^1} Theta^{n+1}.
DiffForm noether_current(const CoveringCR& ccr, const VectorField& xi);

struct NoetherReport {
  bool closed_form = false;
  bool exact_zero = false;      // closed-form residual vanishes symbolically
  double max_deviation = 0.0;   // numeric path
  double stencil_bound = 0.0;
};

// Residual of d[j(s)* J] = (omega^i(xi^1) Pi_i o j(s)) eta along a section.
// For general CRs the admissibility precondition is enforced first.
NoetherReport noether_residual(const CoveringCR& ccr, const VectorField& xi,
                               const NumericSection& s, const GridSpec& grid,
                               const ParamValues& params = {});

struct EnergyMomentum {
  std::vector<std::vector<Expr>> T;          // T^nu_mu
  std::vector<std::vector<Expr>> condition;  // F^nu_i d_nu Gamma^i_mu, reported per mu
  std::vector<bool> condition_holds;         // per mu
};

EnergyMomentum energy_momentum(const ConstitutiveRelation& cr, const Connection& nu);

// (xi^i F^mu_i eta_mu, xi^i Pi_i eta) for an admissible vertical field.
MixedForm secondary_balance_law(const ConstitutiveRelation& cr, const VectorField& xi);

}  // namespace jc

#endif
