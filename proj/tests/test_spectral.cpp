#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nullcone/lp_profile.hpp"
#include "nullcone/spectral_field.hpp"

using namespace nullcone;

namespace {
constexpr double kPi = std::numbers::pi;
const double kFourPi = 4.0 * kPi;

GridPtr grid16() {
  static GridPtr g = SphereGrid::make(16);
  return g;
}
}  // namespace

TEST_CASE("basis matches closed forms at low degree") {
  // 0Y10 = sqrt(3/4pi) cos(theta); 1Y10 = sqrt(3/8pi) sin(theta);
  // -2Y22 = sqrt(5/4pi) cos^4(theta/2) e^{2 i phi}.
  for (double theta : {0.3, 1.1, 2.5}) {
    for (double phi : {0.0, 0.7}) {
      CHECK(spin_harmonic(0, 1, 0, theta, phi).real() ==
            doctest::Approx(std::sqrt(3.0 / kFourPi) * std::cos(theta)).epsilon(1e-13));
      CHECK(spin_harmonic(1, 1, 0, theta, phi).real() ==
            doctest::Approx(std::sqrt(3.0 / (8.0 * kPi)) * std::sin(theta)).epsilon(1e-13));
      const cplx y = spin_harmonic(-2, 2, 2, theta, phi);
      const cplx ref = std::sqrt(5.0 / kFourPi) * std::pow(std::cos(theta / 2), 4) *
                       std::polar(1.0, 2.0 * phi);
      CHECK(std::abs(y - ref) < 1e-13);
    }
  }
}

TEST_CASE("conjugation symmetry of the basis") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int s = trial % 5 - 2;
    const int l = 2 + trial % 3;
    const int m = trial % (2 * l + 1) - l;
    const double theta = u(rng), phi = u(rng);
    const cplx lhs = std::conj(spin_harmonic(s, l, m, theta, phi));
    const double sign = (((s + m) % 2) + 2) % 2 == 0 ? 1.0 : -1.0;
    const cplx rhs = sign * spin_harmonic(-s, l, -m, theta, phi);
    CHECK(std::abs(lhs - rhs) < 1e-13);
  }
}

TEST_CASE("quadrature orthonormality of the spin bases") {
  auto g = grid16();
  for (int spin = -2; spin <= 2; ++spin) {
    for (auto [l1, m1, l2, m2] : {std::array<int, 4>{2, 1, 2, 1},
                                  std::array<int, 4>{5, -3, 5, -3},
                                  std::array<int, 4>{16, 7, 16, 7},
                                  std::array<int, 4>{4, 2, 9, 2},
                                  std::array<int, 4>{3, 0, 12, 0}}) {
      if (l1 < std::abs(spin) || l2 < std::abs(spin)) continue;
      std::vector<cplx> prod(g->n_samples());
      for (int i = 0; i < g->n_theta(); ++i)
        for (int j = 0; j < g->n_phi(); ++j) {
          prod[i * g->n_phi() + j] =
              spin_harmonic(spin, l1, m1, g->theta(i), g->phi(j)) *
              std::conj(spin_harmonic(spin, l2, m2, g->theta(i), g->phi(j)));
        }
      const cplx integral = g->integrate(prod.data());
      const double expect = (l1 == l2 && m1 == m2) ? 1.0 : 0.0;
      CHECK(std::abs(integral - expect) < 1e-12);
    }
  }
}

TEST_CASE("analyze of a constant and of a basis element") {
  auto g = grid16();
  std::vector<cplx> ones(g->n_samples(), cplx(1.0, 0.0));
  auto f = analyze(g, 0, ones);
  CHECK(std::abs(f.coeff(0, 0) - std::sqrt(kFourPi)) < 1e-12);
  for (int l = 1; l <= 4; ++l)
    for (int m = -l; m <= l; ++m) CHECK(std::abs(f.coeff(l, m)) < 1e-13);

  std::vector<cplx> y21(g->n_samples());
  for (int i = 0; i < g->n_theta(); ++i)
    for (int j = 0; j < g->n_phi(); ++j)
      y21[i * g->n_phi() + j] = spin_harmonic(0, 2, 1, g->theta(i), g->phi(j));
  auto f21 = analyze(g, 0, y21);
  CHECK(std::abs(f21.coeff(2, 1) - 1.0) < 1e-12);
  f21.set_coeff(2, 1, cplx(0.0, 0.0));
  CHECK(l2_norm(f21) < 1e-12);
}

TEST_CASE("round trip at every spin") {
  auto g = grid16();
  std::mt19937_64 rng(7);
  for (int spin = -2; spin <= 2; ++spin) {
    auto f = random_field(g, spin, g->lmax(), rng, /*real=*/false);
    auto back = analyze(g, spin, f.values());
    double err = 0.0;
    for (size_t i = 0; i < f.coeffs().size(); ++i)
      err = std::max(err, std::abs(f.coeffs()[i] - back.coeffs()[i]));
    CHECK(err < 1e-12 * std::max(1.0, l2_norm(f)));
  }
}

TEST_CASE("Parseval") {
  auto g = grid16();
  std::mt19937_64 rng(11);
  auto f = random_field(g, 0, g->lmax(), rng);
  const auto v = f.values();
  std::vector<cplx> sq(v.size());
  for (size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * std::conj(v[i]);
  const double grid_l2 = std::sqrt(std::real(g->integrate(sq.data())));
  CHECK(grid_l2 == doctest::Approx(l2_norm(f)).epsilon(1e-12));
}

TEST_CASE("laplacian eigenvalues and self-adjointness") {
  auto g = grid16();
  SpectralField y10(g, 0);
  y10.set_coeff(1, 0, 1.0);
  auto ly = laplacian(y10);
  CHECK(std::abs(ly.coeff(1, 0) + 2.0) < 1e-14);

  SpectralField y80(g, 0);
  y80.set_coeff(8, 0, 1.0);
  CHECK(std::abs(laplacian(y80).coeff(8, 0) + 72.0) < 1e-12);

  SpectralField c(g, 0);
  c.set_coeff(0, 0, 3.0);
  CHECK(l2_norm(laplacian(c)) < 1e-14);

  std::mt19937_64 rng(3);
  auto f = random_field(g, 0, g->lmax(), rng);
  auto h = random_field(g, 0, g->lmax(), rng);
  CHECK(std::abs(l2_inner(laplacian(f), h) - l2_inner(f, laplacian(h))) < 1e-10);
}

TEST_CASE("eth ladder against the Laplacian") {
  // (1/2)(eth ethbar + ethbar eth) f = laplacian f for every admissible spin.
  auto g = grid16();
  std::mt19937_64 rng(5);
  for (int spin : {-1, 0, 1}) {
    auto f = random_field(g, spin, g->lmax(), rng, false);
    auto combo = eth(eth_bar(f)) + eth_bar(eth(f));
    auto lap = laplacian(f);
    double err = 0.0;
    for (size_t i = 0; i < f.coeffs().size(); ++i)
      err = std::max(err, std::abs(0.5 * combo.coeffs()[i] - lap.coeffs()[i]));
    CHECK(err < 1e-10);
  }
}

TEST_CASE("product projection is the exact L2 projection") {
  auto g = grid16();
  std::mt19937_64 rng(9);
  auto a = random_field(g, 0, 8, rng);
  auto b = random_field(g, 0, 8, rng);
  auto ab = multiply(a, b);  // degree 16 product, still fully resolved
  const auto va = a.values();
  const auto vb = b.values();
  for (auto [l, m] : {std::pair<int, int>{3, 2}, {10, -4}, {16, 0}}) {
    std::vector<cplx> integrand(va.size());
    for (int i = 0; i < g->n_theta(); ++i)
      for (int j = 0; j < g->n_phi(); ++j) {
        const size_t idx = static_cast<size_t>(i) * g->n_phi() + j;
        integrand[idx] =
            va[idx] * vb[idx] * std::conj(spin_harmonic(0, l, m, g->theta(i), g->phi(j)));
      }
    CHECK(std::abs(g->integrate(integrand.data()) - ab.coeff(l, m)) < 1e-12);
  }
}

TEST_CASE("LP projectors: kernel, single block, partition of unity") {
  auto g = grid16();
  LPProfile prof(g->lmax());

  SpectralField c(g, 0);
  c.set_coeff(0, 0, 2.0);
  for (int k = 0; k <= prof.k_max(); ++k) CHECK(l2_norm(lp_project(c, prof, k)) == 0.0);
  CHECK(l2_norm(lp_project_kernel(c) - c) == 0.0);

  // Y80: lambda = 72; only 72/64 = 1.125 lies in the band, with weight 1.
  SpectralField y80(g, 0);
  y80.set_coeff(8, 0, 1.0);
  for (int k = 0; k <= prof.k_max(); ++k) {
    const double n = l2_norm(lp_project(y80, prof, k));
    if (k == 3) {
      CHECK(n == doctest::Approx(1.0).epsilon(1e-14));
    } else {
      CHECK(n < 1e-14);
    }
  }

  std::mt19937_64 rng(13);
  for (int spin : {0, 1, -2}) {
    auto f = random_field(g, spin, g->lmax(), rng, false);
    auto sum = lp_project_below_zero(f, prof);
    for (int k = 0; k <= prof.k_max(); ++k) sum += lp_project(f, prof, k);
    CHECK(l2_norm(sum - f) <= 1e-10 * l2_norm(f));
  }
}

TEST_CASE("Besov examples") {
  auto g = grid16();
  LPProfile prof(g->lmax());

  SpectralField c(g, 0);
  c.set_coeff(0, 0, 1.5 * std::sqrt(kFourPi));  // the constant 1.5
  for (double a : {1.0, 2.0}) {
    for (double s : {-0.5, 0.0, 1.0}) {
      CHECK(besov_norm(c, prof, a, s) ==
            doctest::Approx(1.5 * std::sqrt(kFourPi)).epsilon(1e-12));
    }
  }

  SpectralField y80(g, 0);
  y80.set_coeff(8, 0, 1.0);
  CHECK(besov_norm(y80, prof, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(besov_norm(y80, prof, 1.0, 1.0) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK_THROWS(besov_norm(y80, prof, 0.5, 0.0));
}

TEST_CASE("Sobolev norm: eigenvalue arithmetic and Besov equivalence") {
  auto g = grid16();
  LPProfile prof(g->lmax());

  SpectralField y10(g, 0);
  y10.set_coeff(1, 0, 1.0);
  CHECK(sobolev_norm(y10, 2.0) == doctest::Approx(3.0).epsilon(1e-13));

  SpectralField c(g, 0);
  c.set_coeff(0, 0, 2.0 * std::sqrt(kFourPi));
  CHECK(sobolev_norm(c, -1.0) == doctest::Approx(2.0 * std::sqrt(kFourPi)).epsilon(1e-13));

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    auto f = random_field(g, 0, g->lmax(), rng);
    double prev = 0.0;
    for (double s : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      const double h = sobolev_norm(f, s);
      CHECK(h >= prev);  // monotone in s
      prev = h;
      const double b = besov_norm(f, prof, 2.0, s);
      CHECK(h / b <= 4.0);
      CHECK(b / h <= 4.0);
    }
  }
}

TEST_CASE("conjugate field and reality") {
  auto g = grid16();
  std::mt19937_64 rng(23);
  auto f = random_field(g, 0, g->lmax(), rng);  // real scalar
  CHECK(is_real_scalar(f));
  const auto v = f.values();
  for (const auto& z : v) CHECK(std::abs(z.imag()) < 1e-12);

  auto x = random_field(g, 1, g->lmax(), rng, false);
  auto xc = conj_field(x);
  const auto vx = x.values();
  const auto vxc = xc.values();
  for (size_t i = 0; i < vx.size(); ++i) CHECK(std::abs(std::conj(vx[i]) - vxc[i]) < 1e-11);
}

TEST_CASE("grid validation") {
  CHECK_THROWS(SphereGrid::make(16, 10, 0));   // n_theta below lmax + 1
  CHECK_THROWS(SphereGrid::make(16, 0, 20));   // n_phi below 2 lmax + 1
  auto g = SphereGrid::make(8);
  auto h = SphereGrid::make(8);
  std::mt19937_64 rng(1);
  auto a = random_field(g, 0, 8, rng);
  auto b = random_field(h, 0, 8, rng);
  CHECK_THROWS(l2_inner(a, b));  // distinct grid instances
}
