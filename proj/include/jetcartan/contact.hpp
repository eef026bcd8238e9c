#ifndef JETCARTAN_CONTACT_HPP
#define JETCARTAN_CONTACT_HPP

#include "jetcartan/exterior.hpp"

namespace jc {

// Generators of the partial contact ideal: omega^i = dy^i - sum_{(mu,i) in P}
// z^i_mu dx^mu, and omega^i_sigma = dz^i_sigma - sum_mu z^i_{sigma mu} dx^mu
// for (sigma,i) in P.
std::vector<DiffForm> contact_generators(const JetContext& ctx);

// omega^i(xi) = xi^i - sum_{(mu,i) in P} z^i_mu xi^mu, the characteristic.
Expr characteristic(const JetContext& ctx, const VectorField& xi, int i);

// Adjoint vertical endomorphism S*_eta on a 1-form: the dz^i_mu slots F^mu_i
// feed -z^i_mu F^mu_i eta + F^mu_i dy^i wedge eta_mu. Full-jet contexts only.
MixedForm vertical_endomorphism(const JetContext& ctx, const DiffForm& lambda);

// Pullback along j^1(s) (indeed j^2 where second jets appear): substitutes the
// section and its exact derivatives for fiber/jet coordinates and differentials.
// s maps field index -> expression over base coordinates.
DiffForm pullback_section(const JetContext& ctx, const DiffForm& w,
                          const std::map<int, Expr>& s);
Expr pullback_section(const JetContext& ctx, const Expr& e, const std::map<int, Expr>& s);

}  // namespace jc

#endif
