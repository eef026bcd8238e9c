#ifndef JETCARTAN_PROLONG_HPP
#define JETCARTAN_PROLONG_HPP

#include "jetcartan/contact.hpp"

namespace jc {

class LiftError : public std::runtime_error {
 public:
  explicit LiftError(const std::string& msg) : std::runtime_error(msg) {}
};

// 1-jet prolongation of a projectable vector field on Y to the admitted jet
// slots of the context. Liftability conditions depend on the chart kind
// (full: none; K-partial: component independence; S-split: the admissible
// component shape); violations raise LiftError naming the failed condition.
VectorField prolong_vector_field(const VectorField& xi);

// Nonholonomic frame xi_mu = A^lambda_mu d/dx^lambda with its dual coframe
// and torsion T^mu_{alpha beta} from d psi^mu = T^mu_{ab} psi^a wedge psi^b.
struct Frame {
  JetContext ctx;
  std::vector<std::vector<Expr>> legs;     // [mu][lambda]
  std::vector<std::vector<Expr>> coframe;  // [mu][lambda]: psi^mu = B dx^lambda
  // antisymmetric in the lower pair
  std::vector<std::vector<std::vector<Expr>>> torsion;  // [mu][alpha][beta]
  bool holonomic() const;
};

Frame make_frame(const JetContext& ctx, std::vector<std::vector<Expr>> legs);

// Prolongation in a frame (Theorem-style): xi = xbar^mu xi_mu + xi^i d_i with
// frame components xbar^mu(x), vertical xi^i(x,y); K lists the frame legs
// spanning the admitted distribution. Jet components land on the z~ slots,
// which for a holonomic frame are the coordinate jets.
VectorField prolong_in_frame(const Frame& frame, const std::vector<Expr>& xbar,
                             const std::vector<Expr>& vertical,
                             const std::vector<int>& K);

// Canonical forms on the dual charts.
DiffForm canonical_theta_n1(const JetContext& ctx);   // p eta + p^mu_i dy^i ^ eta_mu
DiffForm canonical_source_form(const JetContext& ctx);  // p_i dy^i ^ eta

// Lift xi^{*alpha} to the momentum chart (x, y, p, p^mu_i), fixed by
// L_{xi^{*alpha}} Theta^{n+1}_2 = -d(alpha^nu eta_nu).
VectorField lift_to_momentum_bundle(const VectorField& xi, const std::vector<Expr>& alpha);

// Lift to the (n+2)-chart (x, y, p_i) leaving p_i dy^i ^ eta invariant.
VectorField lift_to_source_bundle(const VectorField& xi);

// Symmetric linear connection on the base (Christoffel symbols over x).
struct Christoffel {
  JetContext ctx;
  std::vector<std::vector<std::vector<Expr>>> gamma;  // [nu][lambda][mu]
  static Christoffel flat(const JetContext& ctx);
  void validate() const;  // symmetry in the lower pair, base-only entries
};

// Horizontal lifts of the base frame through the prolonged connection:
// result[lambda] spans the horizontal distribution on J^1.
std::vector<VectorField> prolong_connection(const Connection& nu, const Christoffel& g);

}  // namespace jc

#endif
