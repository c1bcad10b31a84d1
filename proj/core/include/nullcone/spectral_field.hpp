#pragma once

#include <random>
#include <vector>

#include "nullcone/sphere_grid.hpp"

namespace nullcone {

// Band-limited spin-weighted field, stored as coefficients over the full
// (l, m) triangle (entries with l < |spin| are zero). Values are immutable by
// convention: operations return new fields.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(GridPtr grid, int spin);
  SpectralField(GridPtr grid, int spin, std::vector<cplx> coeffs);

  const GridPtr& grid() const { return grid_; }
  int spin() const { return spin_; }
  int lmax() const { return grid_->lmax(); }
  bool empty() const { return !grid_; }

  const std::vector<cplx>& coeffs() const { return coeffs_; }
  std::vector<cplx>& coeffs() { return coeffs_; }
  cplx coeff(int l, int m) const { return coeffs_[SphereGrid::coeff_index(l, m)]; }
  void set_coeff(int l, int m, cplx v) { coeffs_[SphereGrid::coeff_index(l, m)] = v; }

  std::vector<cplx> values() const;  // synthesize to the grid

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(cplx a);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(cplx a, SpectralField f) { return f *= a; }
  friend SpectralField operator*(SpectralField f, cplx a) { return f *= a; }

 private:
  GridPtr grid_;
  int spin_ = 0;
  std::vector<cplx> coeffs_;
};

// Forward/inverse transforms.
SpectralField analyze(const GridPtr& grid, int spin, const std::vector<cplx>& samples);
SpectralField analyze_real(const GridPtr& grid, const std::vector<double>& samples);

// Spin ladders. eth raises spin by one with factor +sqrt((l-s)(l+s+1)),
// eth_bar lowers it with factor -sqrt((l+s)(l-s+1)).
SpectralField eth(const SpectralField& f);
SpectralField eth_bar(const SpectralField& f);

// Bochner Laplacian on the spin-s bundle: coefficient-wise -(l(l+1) - s^2).
SpectralField laplacian(const SpectralField& f);
// Eigenvalue of -laplacian at degree l for spin s (always >= 0).
double bochner_eigenvalue(int l, int spin);

// Complex conjugate field: spin flips sign, c'_{lm} = (-1)^{s+m} conj(c_{l,-m}).
SpectralField conj_field(const SpectralField& f);

// Pointwise product, projected back to the band limit with the output spin
// spin(a) + spin(b). Exact as an L^2 projection thanks to the dealiased grid.
SpectralField multiply(const SpectralField& a, const SpectralField& b);

// L^2 pairing <a, b> = integral a * conj(b) (equals the coefficient sum).
cplx l2_inner(const SpectralField& a, const SpectralField& b);
double l2_norm(const SpectralField& f);
double linf_norm(const SpectralField& f);  // max |values| over grid points

// True if spin 0 and conjugate-symmetric (real-valued) to the given tolerance.
bool is_real_scalar(const SpectralField& f, double tol = 1e-12);

// Random band-limited field: unit-scale coefficient profile with decay
// exponent `decay` in l, random phases/amplitudes from rng. real = enforce a
// real-valued field (meaningful for any spin via the conjugate pair; here it
// makes spin-0 fields real-valued).
SpectralField random_field(const GridPtr& grid, int spin, int l_cut, std::mt19937_64& rng,
                           bool real = true, double decay = 1.0);

}  // namespace nullcone
