#pragma once

#include "nullcone/horizontal.hpp"

namespace nullcone {

// Vertical Lie derivative: finite differences of components in the fixed
// frame, at the grid's scheme order (centered inside, one-sided at the ends).
HorizontalField lie_t(const FoliationContext& ctx, const HorizontalField& psi);

// Covariant t-derivative: lie_t plus the second-fundamental-form correction.
// Coincides with lie_t for scalars. Throws UnsupportedRankError above
// total rank 2.
HorizontalField nabla_t(const FoliationContext& ctx, const HorizontalField& psi);

// Covariant integral from the node with index `from`: the unique field with
// nabla_t(result) = psi and result[from] = 0. RK4 on coefficients with the
// sff correction as a linear term; node data is interpolated to stage
// midpoints at matching order.
HorizontalField cint(const FoliationContext& ctx, const HorizontalField& psi, int from);
// Overload resolving an off-grid time argument (throws ParameterError).
HorizontalField cint_at(const FoliationContext& ctx, const HorizontalField& psi, double tau);

// The end-time cutoff integral: cint_0(eta_plus psi) - cint_delta(eta_minus psi).
HorizontalField cint_star(const FoliationContext& ctx, const HorizontalField& psi,
                          const CutoffPair& cutoffs);

// t-parallel transport of the t = 0 slice value: nabla_t(result) = 0,
// result[0] = f0.
HorizontalField parallel_transport(const FoliationContext& ctx, const TensorField& f0);

// Jacobian exp(cint_0 tr k) as a scalar horizontal field.
HorizontalField jacobian(const FoliationContext& ctx);

enum class CommutatorKind { LieGrad, NablaTGrad, CintGrad };

// L^{2,2} size of LHS - RHS for the selected commutation identity, evaluated
// on fields of rank 0 or 1.
double commutator_residual(const FoliationContext& ctx, const HorizontalField& psi,
                           CommutatorKind which);

// Residual of the conformal evolution relation: with gbar = e^{2w} gamma and
// the associated kbar = e^{2w} k + (lie_t w) gbar,
//   nabla_t^bar [ e^{(l-r) w} psi ] - e^{(l-r) w} nabla_t psi
// in L^{2,2}. Requires w constant on each sphere.
double conformal_transport_check(const FoliationContext& ctx, const HorizontalField& psi,
                                 const std::vector<double>& w);

// gamma and the volume form as rank-2 tensors at one node.
TensorField metric_tensor(const FoliationContext& ctx, int i);
TensorField volume_form(const FoliationContext& ctx, int i);

// Internal: nabla_t without the public rank guard (rank 3 intermediates).
HorizontalField nabla_t_any(const FoliationContext& ctx, const HorizontalField& psi);

}  // namespace nullcone
