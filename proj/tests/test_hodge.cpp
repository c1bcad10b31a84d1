#include <cmath>
#include <random>

#include "doctest.h"
#include "nullcone/hodge.hpp"

using namespace nullcone;

namespace {

GridPtr grid16() {
  static GridPtr g = SphereGrid::make(16);
  return g;
}

HodgeSection random_section(const GridPtr& g, int rank, std::mt19937_64& rng,
                            double scale = 1.0) {
  switch (rank) {
    case 0:
      return make_scalar_section(random_field(g, 0, g->lmax(), rng, false), scale);
    case 1:
      return make_oneform_section(random_field(g, 1, g->lmax(), rng, false), scale);
    default:
      return make_tracefree_section(random_field(g, 2, g->lmax(), rng, false), scale);
  }
}

double rel_err(const HodgeSection& a, const HodgeSection& b) {
  return hodge_norm(section_sub(a, b)) / std::max(1e-300, hodge_norm(b));
}

}  // namespace

TEST_CASE("composition identities on the round sphere and under rescaling") {
  auto g = grid16();
  std::mt19937_64 rng(101);
  for (double scale : {1.0, 0.37, 2.4}) {
    const double K = 1.0 / scale;  // Gauss curvature of the rescaled metric
    for (int trial = 0; trial < 10; ++trial) {
      auto f = random_section(g, 0, rng, scale);
      auto x = random_section(g, 1, rng, scale);
      auto v = random_section(g, 2, rng, scale);

      // D1 D1* = -Lap
      {
        auto lhs = d1(d1_star(f));
        auto rhs = f;
        rhs.f = (-1.0 / scale) * laplacian(f.f);
        CHECK(rel_err(lhs, rhs) < 1e-11);
      }
      // D1* D1 = -Lap + K
      {
        auto lhs = d1_star(d1(x));
        HodgeSection rhs = x;
        rhs.plus = (-1.0 / scale) * laplacian(x.plus) + K * x.plus;
        rhs.minus = (-1.0 / scale) * laplacian(x.minus) + K * x.minus;
        CHECK(rel_err(lhs, rhs) < 1e-11);
      }
      // D2 D2* = -Lap/2 - K/2
      {
        auto lhs = d2(d2_star(x));
        HodgeSection rhs = x;
        rhs.plus = (-0.5 / scale) * laplacian(x.plus) - 0.5 * K * x.plus;
        rhs.minus = (-0.5 / scale) * laplacian(x.minus) - 0.5 * K * x.minus;
        CHECK(rel_err(lhs, rhs) < 1e-11);
      }
      // D2* D2 = -Lap/2 + K
      {
        auto lhs = d2_star(d2(v));
        HodgeSection rhs = v;
        rhs.plus = (-0.5 / scale) * laplacian(v.plus) + K * v.plus;
        rhs.minus = (-0.5 / scale) * laplacian(v.minus) + K * v.minus;
        CHECK(rel_err(lhs, rhs) < 1e-11);
      }
    }
  }
}

TEST_CASE("gradients: curl-free input, D1 of a gradient is the Laplacian") {
  auto g = grid16();
  std::mt19937_64 rng(7);
  auto f = random_field(g, 0, g->lmax(), rng);  // real scalar
  auto grad = gradient_section(f);
  auto div_icurl = d1(grad);
  // D1 grad f = Lap f with vanishing imaginary (curl) part.
  auto expect = laplacian(f);
  CHECK(l2_norm(div_icurl.f - expect) < 1e-10 * std::max(1.0, l2_norm(expect)));
  for (const auto& z : div_icurl.f.values()) CHECK(std::abs(z.imag()) < 1e-10);
}

TEST_CASE("spectral example values") {
  auto g = grid16();

  // D1 D1* applied to Y30 equals 12 Y30.
  SpectralField y30(g, 0);
  y30.set_coeff(3, 0, 1.0);
  auto comp = d1(d1_star(make_scalar_section(y30)));
  CHECK(std::abs(comp.f.coeff(3, 0) - 12.0) < 1e-12);

  // d1_star of a constant vanishes.
  SpectralField c(g, 0);
  c.set_coeff(0, 0, 5.0);
  CHECK(hodge_norm(d1_star(make_scalar_section(c))) < 1e-14);

  // D2* D2 on an H2 section built from l=5 content: eigenvalue (l^2+l-2)/2 = 14.
  SpectralField v52(g, 2);
  v52.set_coeff(5, 2, 1.0);
  auto vsec = make_tracefree_section(v52);
  auto back = d2_star(d2(vsec));
  CHECK(std::abs(back.plus.coeff(5, 2) - 14.0) < 1e-12);

  // l=1 one-forms are the kernel of D2*; both routes of D2 D2* vanish there.
  SpectralField x1(g, 1);
  x1.set_coeff(1, 0, 1.0);
  x1.set_coeff(1, 1, cplx(0.3, 0.2));
  auto xsec = make_oneform_section(x1);
  CHECK(hodge_norm(d2_star(xsec)) < 1e-13);
  auto both = xsec;
  both.plus = -0.5 * laplacian(xsec.plus) - 0.5 * xsec.plus;
  both.minus = -0.5 * laplacian(xsec.minus) - 0.5 * xsec.minus;
  CHECK(hodge_norm(both) < 1e-13);
}

TEST_CASE("adjointness via the bundle inner products") {
  auto g = grid16();
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = random_section(g, 0, rng);
    auto x = random_section(g, 1, rng);
    auto v = random_section(g, 2, rng);
    const double a1 = hodge_inner(d1(x), f);
    const double b1 = hodge_inner(x, d1_star(f));
    CHECK(a1 == doctest::Approx(b1).epsilon(1e-10));
    const double a2 = hodge_inner(d2(v), x);
    const double b2 = hodge_inner(v, d2_star(x));
    CHECK(a2 == doctest::Approx(b2).epsilon(1e-10));
  }
}

TEST_CASE("inverses, projections, constants") {
  auto g = grid16();
  std::mt19937_64 rng(47);

  // Left inverse identity D1^{-1} D1 = I on H1.
  auto x = random_section(g, 1, rng);
  CHECK(rel_err(d_inverse(d1(x), HodgeOp::D1), x) < 1e-10);

  // Constants are orthogonal to range(D1): <D1 X, 1> = 0, and the inverse
  // projects them away.
  SpectralField c(g, 0);
  c.set_coeff(0, 0, 2.0);
  auto csec = make_scalar_section(c);
  CHECK(std::abs(hodge_inner(d1(x), csec)) < 1e-12);
  CHECK(hodge_norm(d_inverse(csec, HodgeOp::D1)) < 1e-14);

  // D2^{-1} D2 = I on H2; D2 D2^{-1} = P2.
  auto v = random_section(g, 2, rng);
  CHECK(rel_err(d_inverse(d2(v), HodgeOp::D2), v) < 1e-10);
  auto y = random_section(g, 1, rng);
  auto proj = hodge_projection(y, HodgeOp::D2);
  CHECK(rel_err(d2(d_inverse(y, HodgeOp::D2)), proj) < 1e-10);
  // Projection idempotence.
  CHECK(hodge_norm(section_sub(hodge_projection(proj, HodgeOp::D2), proj)) < 1e-12);

  // Adjoint inverses: D* D*^{-1} = I and D*^{-1} D* = P.
  CHECK(rel_err(d1_star(d_inverse(y, HodgeOp::D1Star)), y) < 1e-10);
  auto f = random_section(g, 0, rng);
  auto pf = hodge_projection(f, HodgeOp::D1);
  CHECK(rel_err(d_inverse(d1_star(f), HodgeOp::D1Star), pf) < 1e-10);
  auto w = random_section(g, 2, rng);
  CHECK(rel_err(d2_star(d_inverse(w, HodgeOp::D2Star)), w) < 1e-10);
}

TEST_CASE("inverse bound: measured constant stays below 4") {
  auto g = grid16();
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    auto y0 = random_section(g, 0, rng);
    auto y1 = random_section(g, 1, rng);
    auto y2 = random_section(g, 2, rng);
    for (auto [sec, op] :
         {std::pair<const HodgeSection*, HodgeOp>{&y0, HodgeOp::D1},
          {&y1, HodgeOp::D2},
          {&y1, HodgeOp::D1Star},
          {&y2, HodgeOp::D2Star}}) {
      auto inv = d_inverse(*sec, op);
      const double c =
          (hodge_gradient_norm(inv) + hodge_norm(inv)) / hodge_norm(*sec);
      CHECK(c <= 4.0);
    }
  }
}

TEST_CASE("conformal covariance is exact scale bookkeeping") {
  auto g = grid16();
  std::mt19937_64 rng(61);
  const double scale = 1.7;
  auto x = random_section(g, 1, rng);
  auto xs = x;
  xs.metric_scale = scale;
  // Dbar1 = scale^{-1} D1 (coefficient-wise identical data).
  auto lhs = d1(xs);
  auto rhs = d1(x);
  for (size_t i = 0; i < lhs.f.coeffs().size(); ++i)
    CHECK(lhs.f.coeffs()[i] == rhs.f.coeffs()[i] / scale);
  // Dbar1* = D1*, Dbar2* = D2*: identical bits.
  auto f = random_section(g, 0, rng);
  auto fs = f;
  fs.metric_scale = scale;
  auto l1 = d1_star(fs);
  auto r1 = d1_star(f);
  for (size_t i = 0; i < l1.plus.coeffs().size(); ++i)
    CHECK(l1.plus.coeffs()[i] == r1.plus.coeffs()[i]);
  auto ls = d2_star(xs);
  auto rs = d2_star(x);
  for (size_t i = 0; i < ls.plus.coeffs().size(); ++i)
    CHECK(ls.plus.coeffs()[i] == rs.plus.coeffs()[i]);
}

TEST_CASE("rank mismatch raises a type error") {
  auto g = grid16();
  std::mt19937_64 rng(3);
  auto f = random_section(g, 0, rng);
  auto x = random_section(g, 1, rng);
  CHECK_THROWS(d1(f));
  CHECK_THROWS(d2(x));
  CHECK_THROWS(d1_star(x));
  CHECK_THROWS(d2_star(f));
}
