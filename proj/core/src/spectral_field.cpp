#include "nullcone/spectral_field.hpp"

#include <algorithm>
#include <cmath>

#include "nullcone/errors.hpp"

namespace nullcone {

namespace {
void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (a.grid() != b.grid()) throw ConfigError("fields live on different grids");
}
}  // namespace

SpectralField::SpectralField(GridPtr grid, int spin)
    : grid_(std::move(grid)), spin_(spin), coeffs_(grid_->n_coeff(), cplx(0.0, 0.0)) {
  if (spin < kMinSpin || spin > kMaxSpin) throw ConfigError("spin out of range");
}

SpectralField::SpectralField(GridPtr grid, int spin, std::vector<cplx> coeffs)
    : grid_(std::move(grid)), spin_(spin), coeffs_(std::move(coeffs)) {
  if (spin < kMinSpin || spin > kMaxSpin) throw ConfigError("spin out of range");
  if (static_cast<int>(coeffs_.size()) != grid_->n_coeff())
    throw ConfigError("coefficient vector has wrong length");
}

std::vector<cplx> SpectralField::values() const {
  std::vector<cplx> out(grid_->n_samples());
  grid_->synthesize(spin_, coeffs_.data(), out.data());
  return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(*this, o);
  if (spin_ != o.spin_) throw ConfigError("cannot add fields of different spin");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(*this, o);
  if (spin_ != o.spin_) throw ConfigError("cannot subtract fields of different spin");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(cplx a) {
  for (auto& c : coeffs_) c *= a;
  return *this;
}

SpectralField analyze(const GridPtr& grid, int spin, const std::vector<cplx>& samples) {
  if (static_cast<int>(samples.size()) != grid->n_samples())
    throw ConfigError("analyze: sample array does not match the grid");
  SpectralField out(grid, spin);
  grid->analyze(spin, samples.data(), out.coeffs().data());
  return out;
}

SpectralField analyze_real(const GridPtr& grid, const std::vector<double>& samples) {
  std::vector<cplx> c(samples.begin(), samples.end());
  return analyze(grid, 0, c);
}

SpectralField eth(const SpectralField& f) {
  const int s = f.spin();
  if (s + 1 > kMaxSpin) throw ConfigError("eth: spin out of range");
  SpectralField out(f.grid(), s + 1);
  for (int l = std::abs(s + 1); l <= f.lmax(); ++l) {
    const double fac = std::sqrt(static_cast<double>(l - s) * (l + s + 1));
    for (int m = -l; m <= l; ++m) out.set_coeff(l, m, fac * f.coeff(l, m));
  }
  return out;
}

SpectralField eth_bar(const SpectralField& f) {
  const int s = f.spin();
  if (s - 1 < kMinSpin) throw ConfigError("eth_bar: spin out of range");
  SpectralField out(f.grid(), s - 1);
  for (int l = std::abs(s - 1); l <= f.lmax(); ++l) {
    const double fac = -std::sqrt(static_cast<double>(l + s) * (l - s + 1));
    for (int m = -l; m <= l; ++m) out.set_coeff(l, m, fac * f.coeff(l, m));
  }
  return out;
}

double bochner_eigenvalue(int l, int spin) {
  return static_cast<double>(l) * (l + 1) - static_cast<double>(spin) * spin;
}

SpectralField laplacian(const SpectralField& f) {
  SpectralField out(f.grid(), f.spin());
  for (int l = std::abs(f.spin()); l <= f.lmax(); ++l) {
    const double lam = bochner_eigenvalue(l, f.spin());
    for (int m = -l; m <= l; ++m) out.set_coeff(l, m, -lam * f.coeff(l, m));
  }
  return out;
}

SpectralField conj_field(const SpectralField& f) {
  const int s = f.spin();
  SpectralField out(f.grid(), -s);
  for (int l = std::abs(s); l <= f.lmax(); ++l) {
    for (int m = -l; m <= l; ++m) {
      const double sign = ((s + m) % 2 == 0) ? 1.0 : -1.0;
      out.set_coeff(l, -m, sign * std::conj(f.coeff(l, m)));
    }
  }
  return out;
}

SpectralField multiply(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b);
  const int spin = a.spin() + b.spin();
  if (std::abs(a.spin()) > kMaxTransformSpin || std::abs(b.spin()) > kMaxTransformSpin ||
      std::abs(spin) > kMaxTransformSpin)
    throw ConfigError("multiply: product spin out of transform range");
  const auto va = a.values();
  const auto vb = b.values();
  std::vector<cplx> prod(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) prod[i] = va[i] * vb[i];
  return analyze(a.grid(), spin, prod);
}

cplx l2_inner(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b);
  if (a.spin() != b.spin()) throw ConfigError("l2_inner: spin mismatch");
  cplx acc(0.0, 0.0);
  const auto& ca = a.coeffs();
  const auto& cb = b.coeffs();
  for (std::size_t i = 0; i < ca.size(); ++i) acc += ca[i] * std::conj(cb[i]);
  return acc;
}

double l2_norm(const SpectralField& f) {
  double acc = 0.0;
  for (const auto& c : f.coeffs()) acc += std::norm(c);
  return std::sqrt(acc);
}

double linf_norm(const SpectralField& f) {
  double best = 0.0;
  for (const auto& v : f.values()) best = std::max(best, std::abs(v));
  return best;
}

bool is_real_scalar(const SpectralField& f, double tol) {
  if (f.spin() != 0) return false;
  for (int l = 0; l <= f.lmax(); ++l) {
    for (int m = -l; m <= l; ++m) {
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      if (std::abs(f.coeff(l, m) - sign * std::conj(f.coeff(l, -m))) > tol) return false;
    }
  }
  return true;
}

SpectralField random_field(const GridPtr& grid, int spin, int l_cut, std::mt19937_64& rng,
                           bool real, double decay) {
  l_cut = std::min(l_cut, grid->lmax());
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpectralField out(grid, spin);
  for (int l = std::abs(spin); l <= l_cut; ++l) {
    const double scale = std::pow(1.0 + l, -decay);
    for (int m = -l; m <= l; ++m) {
      out.set_coeff(l, m, scale * cplx(gauss(rng), gauss(rng)));
    }
  }
  if (real && spin == 0) {
    // Symmetrize to a real-valued scalar.
    SpectralField sym(grid, 0);
    for (int l = 0; l <= l_cut; ++l) {
      for (int m = -l; m <= l; ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        sym.set_coeff(l, m, 0.5 * (out.coeff(l, m) + sign * std::conj(out.coeff(l, -m))));
      }
    }
    return sym;
  }
  return out;
}

}  // namespace nullcone
