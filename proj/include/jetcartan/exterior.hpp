#ifndef JETCARTAN_EXTERIOR_HPP
#define JETCARTAN_EXTERIOR_HPP

#include "jetcartan/diff_form.hpp"

namespace jc {

// eta, eta_mu = i_{d/dx^mu} eta, eta_{mu nu} = i_nu i_mu eta, with the
// sqrt|G| factor from the context metric. indices has 0..2 entries; a
// repeated pair yields the zero form (repeated_flag set when given).
DiffForm eta_form(const JetContext& ctx, const std::vector<int>& indices,
                  bool* repeated_flag = nullptr);
DiffForm eta(const JetContext& ctx);
DiffForm eta_mu(const JetContext& ctx, int mu);

DiffForm exterior_d(const DiffForm& w);
DiffForm interior_product(const VectorField& xi, const DiffForm& w);
DiffForm lie_derivative(const VectorField& xi, const DiffForm& w);  // Cartan formula

enum class DerivMode { Full, Reduced };

// Total derivative d_mu on the extended jet chart. Full mode is the
// prolongation derivative (fresh y^i_{;mu} slots for pairs outside P);
// Reduced restricts the first-order sum to admitted pairs.
Expr total_derivative(const JetContext& ctx, int mu, const Expr& e,
                      DerivMode mode = DerivMode::Full);

// Horizontal projection h0: dx fixed, dy^i and dz^i_L traded for their
// total-derivative images. Full mode uses all directions (spec default);
// Reduced only the admitted ones, which is what annihilates the partial
// contact ideal.
DiffForm horizontal_projection(const JetContext& ctx, const DiffForm& w,
                               DerivMode mode = DerivMode::Full);

// Reduced horizontal differential: dhat f = (d_mu f) dx^mu on functions,
// zero on every coordinate differential, derivation over wedge.
DiffForm reduced_horizontal_d(const JetContext& ctx, const DiffForm& w);

// Iglesias differential on (alpha^k, beta^{k+1}): (-d alpha + beta, d beta).
MixedForm iglesias_d(const MixedForm& f);
MixedForm iglesias_d_hat(const JetContext& ctx, const MixedForm& f);

}  // namespace jc

#endif
