#ifndef JETCARTAN_CONSTITUTIVE_HPP
#define JETCARTAN_CONSTITUTIVE_HPP

#include <array>
#include <variant>

#include "jetcartan/prolong.hpp"

namespace jc {

// Constitutive kinds carried alongside the raw components. When a kind is
// given, the F/Pi components are derived from its data and the stated
// coherence is an invariant, not an input.
struct KindGeneral {};
struct KindLagrangian { Expr L; };
struct KindSemiLagrangian { Expr L; std::vector<Expr> Q; };
struct KindLPlusD { Expr L; Expr D; };
struct KindVectorPotential { std::vector<Expr> h; std::vector<Expr> Pi; };
struct KindRet {};
using CrKind = std::variant<KindGeneral, KindLagrangian, KindSemiLagrangian, KindLPlusD,
                            KindVectorPotential, KindRet>;

class ConstitutiveRelation {
 public:
  ConstitutiveRelation() = default;
  // general CR from raw components; flux keys are admitted (mu, i) pairs
  static ConstitutiveRelation general(JetContext ctx,
                                      std::map<std::pair<int, int>, Expr> flux,
                                      std::vector<Expr> sources);
  static ConstitutiveRelation lagrangian(JetContext ctx, Expr L);
  static ConstitutiveRelation semi_lagrangian(JetContext ctx, Expr L, std::vector<Expr> Q);
  static ConstitutiveRelation l_plus_d(JetContext ctx, Expr L, Expr D);
  static ConstitutiveRelation vector_potential(JetContext ctx, std::vector<Expr> h,
                                               std::vector<Expr> Pi);
  static ConstitutiveRelation ret(JetContext ctx, std::map<std::pair<int, int>, Expr> flux,
                                  std::vector<Expr> sources);

  const JetContext& ctx() const { return ctx_; }
  const CrKind& kind() const { return kind_; }
  Expr F(int mu, int i) const;   // zero off the admitted set
  Expr Pi(int i) const;          // sign flag not applied here
  bool source_negated() const { return negate_source_; }
  ConstitutiveRelation with_negated_source() const;
  // source as it enters the Poincare-Cartan form (C_- applies the sign)
  Expr source_term(int i) const { return negate_source_ ? -Pi(i) : Pi(i); }

  bool is_conservative() const;  // all Pi = 0

 private:
  JetContext ctx_;
  CrKind kind_ = KindGeneral{};
  std::map<std::pair<int, int>, Expr> F_;
  std::vector<Expr> Pi_;
  bool negate_source_ = false;
  void validate() const;
};

struct CoveringCR {
  ConstitutiveRelation cr;
  Expr p;
};

// p := -sum z^i_mu F^mu_i (the lifted CCR).
CoveringCR lift_ccr(const ConstitutiveRelation& cr);
// Lagrangian-kind covering with the Legendre scalar p = L - z L_z.
CoveringCR legendre_ccr(const ConstitutiveRelation& cr);

// Poincare-Cartan mixed form: alpha = [p eta +] [F Gamma eta +] F dy ^ eta_mu,
// beta = source_term dy ^ eta.
MixedForm theta_pc(const ConstitutiveRelation& cr, const Connection* nu = nullptr);
MixedForm theta_pc(const CoveringCR& ccr, const Connection* nu = nullptr);

struct SemiLagrangianVerdict {
  enum class Status { Yes, No, Inconclusive } status;
  std::optional<Expr> L;                      // reconstructed when polynomial
  std::optional<std::array<int, 4>> witness;  // (mu,i,nu,j) failing pair
  std::string note;
};

// Mixed-derivative symmetry d F^mu_i / d z^j_nu = d F^nu_j / d z^i_mu over
// admitted pairs; on success with polynomial flux, L by straight-line
// integration from z = 0.
SemiLagrangianVerdict is_semi_lagrangian(const ConstitutiveRelation& cr);

struct CcrContactForms {
  std::vector<Expr> first;                    // per field i (Euler-Lagrange)
  std::map<std::pair<int, int>, Expr> second; // per admitted (mu, i)
};

CcrContactForms ccr_contact_forms(const CoveringCR& ccr);

// Per-direction nu-homogeneity: the horizontal lifts' prolongations must be
// infinitesimal symmetries of the constitutive mapping (Lie derivative of
// Theta_C vanishing on every canonical slot except the pure eta one).
std::vector<bool> is_homogeneous(const ConstitutiveRelation& cr, const Connection& nu);

}  // namespace jc

#endif
