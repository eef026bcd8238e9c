#ifndef JETCARTAN_TRANSFORM_HPP
#define JETCARTAN_TRANSFORM_HPP

#include "jetcartan/constitutive.hpp"

namespace jc {

// Bundle automorphism: base map xbar^mu(x), fiber map phi^i(x, y), carried
// together with its inverse (checked to compose to the identity). The jet
// prolongation acts affinely on the z slots.
class Automorphism {
 public:
  Automorphism(JetContext ctx, std::vector<Expr> base_map, std::vector<Expr> fiber_map,
               std::vector<Expr> base_inv, std::vector<Expr> fiber_inv);

  const JetContext& ctx() const { return ctx_; }
  const std::vector<Expr>& base_map() const { return base_; }
  const std::vector<Expr>& fiber_map() const { return fiber_; }
  Automorphism inverse() const;

  // identity on the given chart
  static Automorphism identity(const JetContext& ctx);

  // Substitution taking a function on Z_p to its composition with the
  // prolonged map: x -> xbar(x), y -> phi(x,y), z -> z'(x,y,z).
  Bindings prolonged_bindings() const;

  Expr det_jacobian_base() const;                  // det J(xbar)
  Expr jac_base(int mu, int nu) const;             // d xbar^mu / d x^nu
  Expr jac_base_inv(int mu, int nu) const;         // entries of J(xbar)^{-1}, composed at x
  Expr jac_fiber(int i, int j) const;              // d phi^i / d y^j

 private:
  JetContext ctx_;
  std::vector<Expr> base_, fiber_, base_inv_, fiber_inv_;
  std::vector<std::vector<Expr>> jac_inv_;  // symbolic inverse of J(xbar)
  void check_structure() const;             // S/K preservation for partial charts
};

// Push-forward of a covering constitutive relation: Theta_{C^phi} =
// ((phi^1)^{-1})^* Theta_C, realized through the closed transformation law
// for (p, F, Pi).
CoveringCR transform_cr(const CoveringCR& ccr, const Automorphism& phi);

// Independent route for validation: pull back an arbitrary mixed form through
// the prolonged automorphism (differentials transformed, coordinates
// composed).
MixedForm pullback_mixed(const MixedForm& f, const Automorphism& phi);

}  // namespace jc

#endif
