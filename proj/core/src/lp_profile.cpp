#include "nullcone/lp_profile.hpp"

#include <cmath>
#include <limits>

#include "nullcone/errors.hpp"

namespace nullcone {

namespace {

double mollifier(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// Smooth unit step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x) {
  const double a = mollifier(x);
  const double b = mollifier(1.0 - x);
  return a / (a + b);
}

// 1 on (-inf, 9/8], 0 on [2, inf).
double lowpass(double x) {
  if (x <= 1.125) return 1.0;
  if (x >= 2.0) return 0.0;
  return smooth_step((2.0 - x) / 0.875);
}

}  // namespace

LPProfile::LPProfile(int lmax) {
  const double lambda_max = static_cast<double>(lmax) * (lmax + 1);
  k_min_ = 0;
  k_max_ = 0;
  while (lambda_max / std::pow(4.0, k_max_) > 2.0) ++k_max_;
}

double LPProfile::cutoff(double x) const {
  x = std::abs(x);
  return lowpass(x) - lowpass(4.0 * x);
}

double LPProfile::band_weight(int k, double lambda) const {
  return cutoff(lambda / std::pow(4.0, k));
}

SpectralField lp_project(const SpectralField& f, const LPProfile& profile, int k) {
  SpectralField out(f.grid(), f.spin());
  for (int l = std::abs(f.spin()); l <= f.lmax(); ++l) {
    const double lam = bochner_eigenvalue(l, f.spin());
    const double w = lam == 0.0 ? 0.0 : profile.band_weight(k, lam);
    if (w == 0.0) continue;
    for (int m = -l; m <= l; ++m) out.set_coeff(l, m, w * f.coeff(l, m));
  }
  return out;
}

SpectralField lp_project_kernel(const SpectralField& f) {
  SpectralField out(f.grid(), f.spin());
  for (int l = std::abs(f.spin()); l <= f.lmax(); ++l) {
    if (bochner_eigenvalue(l, f.spin()) != 0.0) continue;
    for (int m = -l; m <= l; ++m) out.set_coeff(l, m, f.coeff(l, m));
  }
  return out;
}

SpectralField lp_project_below_zero(const SpectralField& f, const LPProfile& profile) {
  SpectralField out = lp_project_kernel(f);
  // Negative bands: nonzero only for eigenvalues below 2 * 4^k, k < 0; on the
  // integer spectrum only k = -1 could matter and only for lambda < 1/2, which
  // never occurs. Kept for fidelity to the definition.
  for (int k = -2; k < 0; ++k) out += lp_project(f, profile, k);
  return out;
}

double besov_norm(const SpectralField& f, const LPProfile& profile, double a, double s) {
  if (!(a >= 1.0)) throw ParameterError("besov_norm: summability a must be >= 1");
  const double low = l2_norm(lp_project_below_zero(f, profile));
  if (std::isinf(a)) {
    double best = low;
    for (int k = 0; k <= profile.k_max(); ++k) {
      best = std::max(best, std::pow(2.0, s * k) * l2_norm(lp_project(f, profile, k)));
    }
    return best;
  }
  double acc = std::pow(low, a);
  for (int k = 0; k <= profile.k_max(); ++k) {
    acc += std::pow(2.0, a * s * k) * std::pow(l2_norm(lp_project(f, profile, k)), a);
  }
  return std::pow(acc, 1.0 / a);
}

double sobolev_norm(const SpectralField& f, double s) {
  double acc = 0.0;
  for (int l = std::abs(f.spin()); l <= f.lmax(); ++l) {
    const double w = std::pow(1.0 + bochner_eigenvalue(l, f.spin()), s);
    for (int m = -l; m <= l; ++m) acc += w * std::norm(f.coeff(l, m));
  }
  return std::sqrt(acc);
}

}  // namespace nullcone
