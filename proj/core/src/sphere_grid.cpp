#include "nullcone/sphere_grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <numbers>

#include "nullcone/errors.hpp"
#include "nullcone/parallel.hpp"

namespace nullcone {

namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

// Pre-sized so lookups are lock-free; covers l through ~250.
long double log_factorial(int n) {
  static const std::vector<long double> table = [] {
    std::vector<long double> t(1024, 0.0L);
    for (std::size_t k = 1; k < t.size(); ++k)
      t[k] = t[k - 1] + std::log(static_cast<long double>(k));
    return t;
  }();
  return table[static_cast<std::size_t>(n)];
}

}  // namespace

double wigner_d(int l, int mp, int m, double beta) {
  if (l < 0 || std::abs(mp) > l || std::abs(m) > l) return 0.0;
  const long double c = std::cos(0.5L * static_cast<long double>(beta));
  const long double s = std::sin(0.5L * static_cast<long double>(beta));
  const long double pref = 0.5L * (log_factorial(l + mp) + log_factorial(l - mp) +
                                   log_factorial(l + m) + log_factorial(l - m));
  const int kmin = std::max(0, m - mp);
  const int kmax = std::min(l + m, l - mp);
  // Powers of cos/sin(beta/2) appearing in the sum, built iteratively.
  std::vector<long double> cpow(2 * l + 1, 1.0L), spow(2 * l + 1, 1.0L);
  for (int k = 1; k <= 2 * l; ++k) {
    cpow[k] = cpow[k - 1] * c;
    spow[k] = spow[k - 1] * s;
  }
  long double sum = 0.0L;
  for (int k = kmin; k <= kmax; ++k) {
    const long double den = log_factorial(l + m - k) + log_factorial(k) +
                            log_factorial(mp - m + k) + log_factorial(l - mp - k);
    const int sign = ((mp - m + k) % 2 == 0) ? 1 : -1;
    const int pc = 2 * l + m - mp - 2 * k;
    const int ps = mp - m + 2 * k;
    sum += sign * std::exp(pref - den) * cpow[pc] * spow[ps];
  }
  return static_cast<double>(sum);
}

cplx spin_harmonic(int spin, int l, int m, double theta, double phi) {
  const double sign = (spin % 2 == 0) ? 1.0 : -1.0;
  const double lam = sign * std::sqrt((2.0 * l + 1.0) / (4.0 * kPi)) * wigner_d(l, m, -spin, theta);
  return lam * std::polar(1.0, m * phi);
}

struct SphereGrid::FftPlans {
  fftw_plan forward = nullptr;   // e^{-i m phi} analysis direction
  fftw_plan backward = nullptr;  // e^{+i m phi} synthesis direction
  ~FftPlans() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

SphereGrid::SphereGrid(int lmax, int n_theta, int n_phi)
    : lmax_(lmax), n_theta_(n_theta), n_phi_(n_phi) {
  std::vector<double> x;
  gauss_legendre(n_theta_, x, gl_weight_);
  theta_.resize(n_theta_);
  point_weight_.resize(n_theta_);
  for (int i = 0; i < n_theta_; ++i) {
    theta_[i] = std::acos(x[n_theta_ - 1 - i]);  // increasing theta
    point_weight_[i] = gl_weight_[n_theta_ - 1 - i] * (2.0 * kPi / n_phi_);
  }
  phi_.resize(n_phi_);
  for (int j = 0; j < n_phi_; ++j) phi_[j] = 2.0 * kPi * j / n_phi_;
  build_basis_tables();
  build_fft_plans();
}

SphereGrid::~SphereGrid() = default;

std::shared_ptr<const SphereGrid> SphereGrid::make(int lmax, int n_theta, int n_phi) {
  if (lmax < 2) throw ConfigError("SphereGrid: lmax must be >= 2");
  if (n_theta == 0) n_theta = (3 * lmax) / 2 + 2;
  if (n_phi == 0) n_phi = 3 * lmax + 4;
  if (n_theta < lmax + 1)
    throw ConfigError("SphereGrid: n_theta must be >= lmax + 1");
  if (n_phi < 2 * lmax + 1)
    throw ConfigError("SphereGrid: n_phi must be >= 2*lmax + 1");
  return std::shared_ptr<const SphereGrid>(new SphereGrid(lmax, n_theta, n_phi));
}

void SphereGrid::build_basis_tables() {
  basis_.resize(2 * kMaxTransformSpin + 1);
  for (int spin = -kMaxTransformSpin; spin <= kMaxTransformSpin; ++spin) {
    auto& table = basis_[spin + kMaxTransformSpin];
    table.assign(static_cast<std::size_t>(n_theta_) * n_coeff(), 0.0);
    const double sign = (spin % 2 == 0) ? 1.0 : -1.0;
    parallel_for(n_theta_, [&](std::size_t i) {
      const double beta = theta_[i];
      for (int l = std::abs(spin); l <= lmax_; ++l) {
        const double norm = sign * std::sqrt((2.0 * l + 1.0) / (4.0 * kPi));
        for (int m = -l; m <= l; ++m) {
          table[i * n_coeff() + coeff_index(l, m)] = norm * wigner_d(l, m, -spin, beta);
        }
      }
    });
  }
}

void SphereGrid::build_fft_plans() {
  fft_ = std::make_unique<FftPlans>();
  std::vector<cplx> buf(n_phi_);
  std::lock_guard<std::mutex> lock(fftw_mutex());
  fft_->forward = fftw_plan_dft_1d(n_phi_, reinterpret_cast<fftw_complex*>(buf.data()),
                                   reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  fft_->backward = fftw_plan_dft_1d(n_phi_, reinterpret_cast<fftw_complex*>(buf.data()),
                                    reinterpret_cast<fftw_complex*>(buf.data()), FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
}

double SphereGrid::basis_theta(int spin, int l, int m, int i) const {
  return basis_[spin + kMaxTransformSpin]
               [static_cast<std::size_t>(i) * n_coeff() + coeff_index(l, m)];
}

void SphereGrid::analyze(int spin, const cplx* samples, cplx* coeffs) const {
  if (std::abs(spin) > kMaxTransformSpin)
    throw ConfigError("analyze: spin out of transform range");
  const auto& table = basis_[spin + kMaxTransformSpin];
  const int nc = n_coeff();
  std::fill(coeffs, coeffs + nc, cplx(0.0, 0.0));

  // Azimuthal DFT per theta row: g_m(theta_i) = (2pi/n_phi) sum_j f_ij e^{-im phi_j}.
  std::vector<cplx> fm(static_cast<std::size_t>(n_theta_) * (2 * lmax_ + 1));
  std::vector<cplx> row(n_phi_);
  for (int i = 0; i < n_theta_; ++i) {
    std::memcpy(row.data(), samples + static_cast<std::size_t>(i) * n_phi_,
                sizeof(cplx) * n_phi_);
    fftw_execute_dft(fft_->forward, reinterpret_cast<fftw_complex*>(row.data()),
                     reinterpret_cast<fftw_complex*>(row.data()));
    for (int m = -lmax_; m <= lmax_; ++m) {
      const int bin = (m % n_phi_ + n_phi_) % n_phi_;
      fm[static_cast<std::size_t>(i) * (2 * lmax_ + 1) + (m + lmax_)] = row[bin];
    }
  }

  // Legendre stage with Gauss-Legendre weights folded into point_weight_.
  for (int l = std::abs(spin); l <= lmax_; ++l) {
    for (int m = -l; m <= l; ++m) {
      cplx acc(0.0, 0.0);
      const int ci = coeff_index(l, m);
      for (int i = 0; i < n_theta_; ++i) {
        acc += point_weight_[i] * table[static_cast<std::size_t>(i) * nc + ci] *
               fm[static_cast<std::size_t>(i) * (2 * lmax_ + 1) + (m + lmax_)];
      }
      coeffs[ci] = acc;
    }
  }
}

void SphereGrid::synthesize(int spin, const cplx* coeffs, cplx* samples) const {
  if (std::abs(spin) > kMaxTransformSpin)
    throw ConfigError("synthesize: spin out of transform range");
  const auto& table = basis_[spin + kMaxTransformSpin];
  const int nc = n_coeff();

  std::vector<cplx> row(n_phi_);
  for (int i = 0; i < n_theta_; ++i) {
    std::fill(row.begin(), row.end(), cplx(0.0, 0.0));
    for (int m = -lmax_; m <= lmax_; ++m) {
      cplx acc(0.0, 0.0);
      for (int l = std::max(std::abs(spin), std::abs(m)); l <= lmax_; ++l) {
        acc += coeffs[coeff_index(l, m)] * table[static_cast<std::size_t>(i) * nc + coeff_index(l, m)];
      }
      const int bin = (m % n_phi_ + n_phi_) % n_phi_;
      row[bin] += acc;
    }
    fftw_execute_dft(fft_->backward, reinterpret_cast<fftw_complex*>(row.data()),
                     reinterpret_cast<fftw_complex*>(row.data()));
    std::memcpy(samples + static_cast<std::size_t>(i) * n_phi_, row.data(),
                sizeof(cplx) * n_phi_);
  }
}

cplx SphereGrid::integrate(const cplx* samples) const {
  cplx acc(0.0, 0.0);
  for (int i = 0; i < n_theta_; ++i) {
    cplx rowsum(0.0, 0.0);
    for (int j = 0; j < n_phi_; ++j) rowsum += samples[static_cast<std::size_t>(i) * n_phi_ + j];
    acc += point_weight_[i] * rowsum;
  }
  return acc;
}

}  // namespace nullcone
