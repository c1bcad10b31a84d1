#pragma once

#include <cstdint>
#include <vector>

#include "nullcone/spectral_field.hpp"

namespace nullcone {

// Conformal log factor of a metric e^{2u} x round unit sphere, with cached
// grid values of u. u may be any real scalar field; the constant-on-sphere
// case is detected and handled without grid work.
class ConformalFactor {
 public:
  ConformalFactor() = default;  // u == 0
  explicit ConformalFactor(SpectralField u);

  bool trivial() const { return trivial_; }
  bool constant() const { return constant_; }
  double constant_value() const { return u0_; }
  const SpectralField& u() const { return u_; }
  bool has_grid() const { return !u_.empty(); }

  // e^{c u} f (c a small integer). Exact scalar multiply when u is constant.
  SpectralField apply_exp(const SpectralField& f, int c) const;
  // e^{c u} as grid samples.
  std::vector<cplx> exp_values(const GridPtr& grid, int c) const;

 private:
  SpectralField u_;
  std::vector<cplx> u_values_;
  bool trivial_ = true;
  bool constant_ = true;
  double u0_ = 0.0;
};

// Covariant-slot tensor field on one sphere, stored as 2^rank spin-weighted
// components. Bit i of a component index set means slot i pairs with the
// conjugate dyad leg; the component spin is rank - 2*popcount. Slots marked in
// contra_mask are contravariant (their components are contracted with the
// lowered dyad instead); only the t-derivative correction supports them.
struct TensorField {
  int rank = 0;
  std::uint8_t contra_mask = 0;
  std::vector<SpectralField> comp;

  const GridPtr& grid() const { return comp.front().grid(); }
  static int component_spin(int rank, int idx);
  bool empty() const { return comp.empty(); }
};

TensorField make_scalar(SpectralField f);
// Real 1-form from its spin +1 component.
TensorField make_oneform(const SpectralField& plus);
// Real symmetric rank-2 tensor from spin +2 part and the mixed (m, mbar)
// component (which is half the round-metric trace).
TensorField make_sym2(const SpectralField& plus2, const SpectralField& mixed);
TensorField zero_tensor(const GridPtr& grid, int rank, std::uint8_t contra_mask = 0);

TensorField tf_add(const TensorField& a, const TensorField& b);
TensorField tf_sub(const TensorField& a, const TensorField& b);
TensorField tf_scale(const TensorField& a, cplx c);
// Pointwise multiply every component by the spin-0 factor.
TensorField tf_scale_field(const TensorField& a, const SpectralField& factor);
TensorField tf_axpy(cplx c, const TensorField& x, const TensorField& y);  // c*x + y

// Covariant differential of a fully covariant tensor with respect to the
// conformal metric e^{2u} x round. The derivative slot is prepended (slot 0).
// Rank of the input must be <= 2.
TensorField tf_gradient(const TensorField& t, const ConformalFactor& u);

// gamma^{ij}-contraction over covariant slots i < j (includes the e^{-2u}
// inverse-metric factor).
TensorField tf_contract(const TensorField& t, int i, int j, const ConformalFactor& u);
// epsilon^{ij}-contraction (the inverse volume form of the conformal metric).
TensorField tf_contract_eps(const TensorField& t, int i, int j, const ConformalFactor& u);

// Tensor product (slots of b appended after slots of a).
TensorField tf_outer(const TensorField& a, const TensorField& b);

// gamma^{xy}-contraction of slot sa of a against slot sb of b; output slots
// are a's remaining slots followed by b's. The workhorse for quadratic terms
// like gamma^{cd} H_{ac} H_{bd}.
TensorField tf_contract_pair(const TensorField& a, int sa, const TensorField& b, int sb,
                             const ConformalFactor& u);
// Same with the inverse volume form epsilon^{xy} (slot of a first).
TensorField tf_contract_pair_eps(const TensorField& a, int sa, const TensorField& b, int sb,
                                 const ConformalFactor& u);

// Swap two slots.
TensorField tf_transpose(const TensorField& t, int i, int j);

// Round-trace of a covariant rank-2 tensor is 2 * mixed component; the
// gamma-trace carries e^{-2u}.
SpectralField tf_trace2(const TensorField& t, const ConformalFactor& u);
// Traceless part of a covariant symmetric rank-2 tensor (metric-independent
// for conformal metrics: subtracts mixed * gamma/gamma-trace bookkeeping).
TensorField tf_tracefree2(const TensorField& t);
// (scalar/2) * gamma as a rank-2 tensor: trace part with gamma-trace `scalar`.
TensorField tf_pure_trace2(const SpectralField& half_trace, const ConformalFactor& u);

// Pointwise squared norm |T|^2 with respect to the conformal metric, as grid
// samples (sum over components of |T_i|^2 with the e^{2u(r-l)} weight).
std::vector<double> tf_pointwise_sq(const TensorField& t, const ConformalFactor& u);

// L^2(gamma) norm: integral of |T|^2_gamma over the gamma measure e^{2u} dOmega.
double tf_l2(const TensorField& t, const ConformalFactor& u);
// Max of |T|_gamma over grid points.
double tf_linf(const TensorField& t, const ConformalFactor& u);

// The t-derivative correction sum of the covariant evolution operator:
// nabla_t Psi = lie_t Psi + tf_k_correction(Psi, k, u). Covariant slots
// subtract the k-pairing, contravariant slots add it.
TensorField tf_k_correction(const TensorField& psi, const TensorField& k,
                            const ConformalFactor& u);

}  // namespace nullcone
