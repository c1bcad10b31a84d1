#pragma once

#include <vector>

#include "nullcone/spectral_field.hpp"

namespace nullcone {

// Smooth dyadic partition profile for the spectral projectors
// P_k = bump(-4^{-k} x Laplacian). The bump is a telescoped mollifier step:
// it equals 1 on [9/32*4, 9/8]... more precisely it is
//   bump(x) = step(x) - step(4x),   step = 1 on (-inf, 9/8], 0 on [2, inf),
// which gives bump == 1 exactly on [1/2, 9/8], support [9/32, 2], and
//   sum_k bump(4^{-k} x) = 1  for every x > 0 (the sum telescopes),
// so the partition of unity is exact on the whole discrete spectrum. The step
// is built from the exp(-1/x) mollifier.
class LPProfile {
 public:
  // Covers Laplacian eigenvalues up to lmax*(lmax+1).
  explicit LPProfile(int lmax);

  double cutoff(double x) const;           // the bump at argument x >= 0
  double band_weight(int k, double lambda) const;  // bump(lambda / 4^k)
  int k_min() const { return k_min_; }
  int k_max() const { return k_max_; }

 private:
  int k_min_ = 0;
  int k_max_ = 0;
};

// P_k f: multiplies the degree-l coefficient by bump(lambda_l / 4^k),
// lambda_l = l(l+1) - spin^2.
SpectralField lp_project(const SpectralField& f, const LPProfile& profile, int k);
// P_-: projection onto the kernel of the Laplacian (lambda_l = 0).
SpectralField lp_project_kernel(const SpectralField& f);
// P_{<0} = P_- + sum_{k<0} P_k.
SpectralField lp_project_below_zero(const SpectralField& f, const LPProfile& profile);

// Besov norm: (sum_{k>=0} 2^{a s k} ||P_k f||_2^a + ||P_{<0} f||_2^a)^{1/a},
// max form when a = infinity (pass a = infinity via std::numeric_limits).
// Throws ParameterError for a < 1.
double besov_norm(const SpectralField& f, const LPProfile& profile, double a, double s);

// ||Lambda^s f||_2 with Lambda^s multiplying degree-l coefficients by
// (1 + lambda_l)^{s/2}.
double sobolev_norm(const SpectralField& f, double s);

}  // namespace nullcone
