#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace nullcone {

using cplx = std::complex<double>;

// Primary fields carry spins -2..2; rank-3 intermediates (curls of the second
// fundamental form, gradients of rank-2 fields) reach +-3, and gradients of
// rank-3 fields touch +-4 at the coefficient level only. Grid transforms are
// tabulated for |spin| <= 3.
inline constexpr int kMinSpin = -4;
inline constexpr int kMaxSpin = 4;
inline constexpr int kMaxTransformSpin = 3;

// Gauss-Legendre colatitudes x equispaced azimuths, with tabulated
// spin-weighted harmonic bases for spins -2..2 and FFT plans for the azimuth
// direction. Immutable after construction and shareable across threads.
//
// Quadrature is exact for integrands that are polynomials of degree
// <= 2*n_theta - 1 in cos(theta) and trigonometric polynomials of degree
// < n_phi in phi. The default sizes follow the 3/2 dealiasing rule so that
// quadratic products of band-limited fields project exactly.
class SphereGrid : public std::enable_shared_from_this<SphereGrid> {
 public:
  // n_theta = 0 / n_phi = 0 pick the defaults (3*lmax/2 + 2, 3*lmax + 4).
  // Throws ConfigError unless n_theta >= lmax + 1 and n_phi >= 2*lmax + 1.
  static std::shared_ptr<const SphereGrid> make(int lmax, int n_theta = 0, int n_phi = 0);
  ~SphereGrid();

  SphereGrid(const SphereGrid&) = delete;
  SphereGrid& operator=(const SphereGrid&) = delete;

  int lmax() const { return lmax_; }
  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  int n_coeff() const { return (lmax_ + 1) * (lmax_ + 1); }
  int n_samples() const { return n_theta_ * n_phi_; }

  double theta(int i) const { return theta_[i]; }
  double phi(int j) const { return phi_[j]; }
  // Quadrature weight for one grid point (i, j): gl_weight(i) * (2*pi/n_phi).
  double point_weight(int i) const { return point_weight_[i]; }

  // Coefficient layout: l-major, m from -l to l.
  static int coeff_index(int l, int m) { return l * l + l + m; }

  // Forward transform: samples (row-major theta x phi) -> coefficients over
  // the full (l, m) triangle; entries with l < |spin| are zero.
  void analyze(int spin, const cplx* samples, cplx* coeffs) const;
  // Inverse transform.
  void synthesize(int spin, const cplx* coeffs, cplx* samples) const;

  // Integral of a sample array over the sphere (unit round measure).
  cplx integrate(const cplx* samples) const;

  // Tabulated basis value s_Y_lm(theta_i, phi = 0) (real).
  double basis_theta(int spin, int l, int m, int i) const;

 private:
  SphereGrid(int lmax, int n_theta, int n_phi);
  void build_basis_tables();
  void build_fft_plans();

  int lmax_;
  int n_theta_;
  int n_phi_;
  std::vector<double> theta_;
  std::vector<double> phi_;
  std::vector<double> gl_weight_;
  std::vector<double> point_weight_;
  // basis_[spin + 2][i * n_coeff + coeff_index(l, m)]
  std::vector<std::vector<double>> basis_;

  struct FftPlans;
  std::unique_ptr<FftPlans> fft_;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

// Wigner d^l_{mp,m}(beta) by the explicit factorial sum (long double, log
// factorials). Exact enough through l ~ 60; used for the basis tables and as
// an oracle in tests.
double wigner_d(int l, int mp, int m, double beta);

// s_Y_lm(theta, phi). Convention: (-1)^s sqrt((2l+1)/4pi) d^l_{m,-s}(theta) e^{i m phi},
// so that eth raises spin with eth sY = +sqrt((l-s)(l+s+1)) (s+1)Y and
// conj(sY_lm) = (-1)^(s+m) (-s)Y_{l,-m}.
cplx spin_harmonic(int spin, int l, int m, double theta, double phi);

}  // namespace nullcone
