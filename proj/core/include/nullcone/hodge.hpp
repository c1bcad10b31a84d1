#pragma once

#include "nullcone/spectral_field.hpp"

namespace nullcone {

// Section of one of the Hodge bundles over the sphere, carried in spin
// components relative to the round unit metric:
//   rank 0: complex scalars            -> one spin-0 field
//   rank 1: real 1-forms               -> spin +1 / -1 conjugate pair
//   rank 2: real symmetric traceless   -> spin +2 / -2 conjugate pair
// metric_scale = e^{2 lambda} rescales the round metric by a constant.
struct HodgeSection {
  int rank = 0;
  double metric_scale = 1.0;
  SpectralField f;              // rank 0
  SpectralField plus, minus;    // rank 1 or 2

  const GridPtr& grid() const { return rank == 0 ? f.grid() : plus.grid(); }
};

HodgeSection make_scalar_section(SpectralField f, double metric_scale = 1.0);
// Real 1-form from its spin +1 component (minus is the conjugate field).
HodgeSection make_oneform_section(const SpectralField& plus, double metric_scale = 1.0);
// Real symmetric traceless 2-tensor from its spin +2 component.
HodgeSection make_tracefree_section(const SpectralField& plus2, double metric_scale = 1.0);
// Gradient of a real scalar as a rank-1 section.
HodgeSection gradient_section(const SpectralField& scalar, double metric_scale = 1.0);

enum class HodgeOp { D1, D2, D1Star, D2Star };

// The symmetric Hodge operators. Under metric_scale: D1, D2 pick up a
// factor 1/metric_scale; D1*, D2* are scale-invariant.
HodgeSection d1(const HodgeSection& x);       // rank 1 -> rank 0, div - i curl
HodgeSection d2(const HodgeSection& x);       // rank 2 -> rank 1, divergence
HodgeSection d1_star(const HodgeSection& x);  // rank 0 -> rank 1
HodgeSection d2_star(const HodgeSection& x);  // rank 1 -> rank 2

// L^2 projection onto the range of D1 (kills the l = 0 scalar mode) or D2
// (kills l <= 1 content of a 1-form).
HodgeSection hodge_projection(const HodgeSection& y, HodgeOp which);

// Inverse on the range: for D1/D2 returns D^{-1} P y; for the adjoints
// returns the unique preimage lying in the range of the corresponding D.
HodgeSection d_inverse(const HodgeSection& y, HodgeOp which);

// Bundle L^2 inner product (real pairing) and norm, honoring metric_scale.
double hodge_inner(const HodgeSection& a, const HodgeSection& b);
double hodge_norm(const HodgeSection& a);
// L^2 norm of the full covariant gradient of the section (round metric scale
// bookkeeping applied).
double hodge_gradient_norm(const HodgeSection& a);

HodgeSection section_add(const HodgeSection& a, const HodgeSection& b);
HodgeSection section_sub(const HodgeSection& a, const HodgeSection& b);
HodgeSection section_scale(const HodgeSection& a, double c);

}  // namespace nullcone
