#pragma once

#include "nullcone/foliation.hpp"
#include "nullcone/lp_profile.hpp"

namespace nullcone {

// Iterated integral norms over the cylinder. order = TFirst gives
// L^{p,q}_{t,x} (t outside, per-slice L^q_x inside); XFirst gives
// L^{q,p}_{x,t} with the Jacobian weight J^{p/q} inside the inner t-integral
// (and J^{1/q} under the sup when p = infinity). Infinities are admitted for
// both exponents. t-integrals use the trapezoid rule on the nodes; sups are
// taken exactly on nodes.
struct MixedNormSpec {
  enum class Order { TFirst, XFirst };
  Order order = Order::TFirst;
  double p = 2.0;  // t-exponent
  double q = 2.0;  // x-exponent
};

double mixed_norm(const FoliationContext& ctx, const HorizontalField& psi,
                  const MixedNormSpec& spec);

// Per-slice tensorial Sobolev/Besov norms: the round spectral multipliers
// with the conformal measure weights.
double tensor_sobolev_x(const TensorField& t, const ConformalFactor& u, double s);
double tensor_besov_x(const TensorField& t, const ConformalFactor& u, const LPProfile& prof,
                      double a, double s);

// Mixed Littlewood-Paley norms B^{a,p,s}: sum over bands of
// 2^{a s k} ||P_k psi||^a_{L^{p,2}_{t,x}} plus the below-zero block (max form
// for a = infinity). H^{p,s} is the a = 2 case.
double besov_mixed_norm(const FoliationContext& ctx, const HorizontalField& psi,
                        const LPProfile& prof, double a, double p, double s);

// First-order evolution norms.
double n1_norm(const FoliationContext& ctx, const HorizontalField& psi);
double n1i_norm(const FoliationContext& ctx, const HorizontalField& psi);

// Certified upper bound for the minimal-antiderivative norm N^{0*}: the
// minimum of n1i over the antiderivative candidates cint_0(psi) + transport(F)
// for F in {0} + extra_initial, together with cint_star(psi).
double n0star_upper(const FoliationContext& ctx, const HorizontalField& psi,
                    const std::vector<TensorField>& extra_initial = {});

// Upper bound for the sum norm N^{0*} + B^{2,0} from an explicit
// decomposition psi = part_a + part_b; the trivial splits (psi, 0) and
// (0, psi) are always included.
double sum_norm_upper(const FoliationContext& ctx, const HorizontalField& part_a,
                      const HorizontalField& part_b, const LPProfile& prof);

struct NNormReport {
  double n1 = 0.0;
  double n1i = 0.0;
  double n0star_upper = 0.0;
  double sum_norm_upper = 0.0;
};
NNormReport n_norms(const FoliationContext& ctx, const HorizontalField& psi,
                    const LPProfile& prof,
                    const std::vector<TensorField>& extra_initial = {});

}  // namespace nullcone
