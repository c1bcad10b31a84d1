#include "nullcone/hodge.hpp"

#include <cmath>

#include "nullcone/errors.hpp"

namespace nullcone {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

void require_rank(const HodgeSection& x, int rank, const char* op) {
  if (x.rank != rank) throw ConfigError(std::string(op) + ": section has wrong rank");
}

// Divide degree-l coefficients by sym(l); degrees with sym(l) == 0 are dropped.
template <typename Sym>
SpectralField invert_symbol(const SpectralField& y, int out_spin, Sym sym) {
  SpectralField out(y.grid(), out_spin);
  for (int l = std::abs(out_spin); l <= y.lmax(); ++l) {
    const double s = sym(l);
    if (s == 0.0) continue;
    for (int m = -l; m <= l; ++m) out.set_coeff(l, m, y.coeff(l, m) / s);
  }
  return out;
}

}  // namespace

HodgeSection make_scalar_section(SpectralField f, double metric_scale) {
  HodgeSection s;
  s.rank = 0;
  s.metric_scale = metric_scale;
  s.f = std::move(f);
  return s;
}

HodgeSection make_oneform_section(const SpectralField& plus, double metric_scale) {
  if (plus.spin() != 1) throw ConfigError("make_oneform_section: spin +1 component expected");
  HodgeSection s;
  s.rank = 1;
  s.metric_scale = metric_scale;
  s.plus = plus;
  s.minus = conj_field(plus);
  return s;
}

HodgeSection make_tracefree_section(const SpectralField& plus2, double metric_scale) {
  if (plus2.spin() != 2) throw ConfigError("make_tracefree_section: spin +2 component expected");
  HodgeSection s;
  s.rank = 2;
  s.metric_scale = metric_scale;
  s.plus = plus2;
  s.minus = conj_field(plus2);
  return s;
}

HodgeSection gradient_section(const SpectralField& scalar, double metric_scale) {
  if (scalar.spin() != 0) throw ConfigError("gradient_section: spin-0 field expected");
  return make_oneform_section((-1.0 / kSqrt2) * eth(scalar), metric_scale);
}

namespace {
// Scale bookkeeping by literal division so the conformal covariance of the
// rescaled operators is bit-exact.
SpectralField divide_scale(SpectralField f, double scale) {
  if (scale != 1.0)
    for (auto& c : f.coeffs()) c /= scale;
  return f;
}
}  // namespace

// D1 X = div X - i curl X = -sqrt(2) eth X_{-1}.
HodgeSection d1(const HodgeSection& x) {
  require_rank(x, 1, "d1");
  HodgeSection out = make_scalar_section(divide_scale((-kSqrt2) * eth(x.minus), x.metric_scale));
  out.metric_scale = x.metric_scale;
  return out;
}

// (D2 V)_{+1} = -(1/sqrt2) eth_bar V_{+2}.
HodgeSection d2(const HodgeSection& x) {
  require_rank(x, 2, "d2");
  HodgeSection out;
  out.rank = 1;
  out.metric_scale = x.metric_scale;
  out.plus = divide_scale((-1.0 / kSqrt2) * eth_bar(x.plus), x.metric_scale);
  out.minus = divide_scale((-1.0 / kSqrt2) * eth(x.minus), x.metric_scale);
  return out;
}

// (D1* f)_{+1} = (1/sqrt2) eth conj(f); scale-invariant.
HodgeSection d1_star(const HodgeSection& x) {
  require_rank(x, 0, "d1_star");
  HodgeSection out;
  out.rank = 1;
  out.metric_scale = x.metric_scale;
  out.plus = (1.0 / kSqrt2) * eth(conj_field(x.f));
  out.minus = (1.0 / kSqrt2) * eth_bar(x.f);
  return out;
}

// (D2* X)_{+2} = (1/sqrt2) eth X_{+1}; scale-invariant.
HodgeSection d2_star(const HodgeSection& x) {
  require_rank(x, 1, "d2_star");
  HodgeSection out;
  out.rank = 2;
  out.metric_scale = x.metric_scale;
  out.plus = (1.0 / kSqrt2) * eth(x.plus);
  out.minus = (1.0 / kSqrt2) * eth_bar(x.minus);
  return out;
}

HodgeSection hodge_projection(const HodgeSection& y, HodgeOp which) {
  HodgeSection out = y;
  switch (which) {
    case HodgeOp::D1:
    case HodgeOp::D1Star: {
      require_rank(y, which == HodgeOp::D1 ? 0 : 1, "hodge_projection");
      if (which == HodgeOp::D1) {
        out.f.set_coeff(0, 0, cplx(0.0, 0.0));  // range(D1) is mean-free
      }
      // range of D1* is all of H1: identity.
      break;
    }
    case HodgeOp::D2:
    case HodgeOp::D2Star: {
      require_rank(y, which == HodgeOp::D2 ? 1 : 2, "hodge_projection");
      if (which == HodgeOp::D2) {
        for (int m = -1; m <= 1; ++m) {  // range(D2) has no l = 1 content
          out.plus.set_coeff(1, m, cplx(0.0, 0.0));
          out.minus.set_coeff(1, m, cplx(0.0, 0.0));
        }
      }
      break;
    }
  }
  return out;
}

HodgeSection d_inverse(const HodgeSection& y, HodgeOp which) {
  HodgeSection out;
  out.metric_scale = y.metric_scale;
  const double scale = y.metric_scale;
  switch (which) {
    case HodgeOp::D1: {
      require_rank(y, 0, "d_inverse(D1)");
      out.rank = 1;
      out.minus = invert_symbol(y.f, -1, [&](int l) {
        return l == 0 ? 0.0 : -kSqrt2 * std::sqrt(static_cast<double>(l) * (l + 1)) / scale;
      });
      out.plus = conj_field(out.minus);
      break;
    }
    case HodgeOp::D2: {
      require_rank(y, 1, "d_inverse(D2)");
      out.rank = 2;
      auto sym = [&](int l) {
        return l < 2 ? 0.0
                     : std::sqrt(static_cast<double>(l + 2) * (l - 1)) / (kSqrt2 * scale);
      };
      out.plus = invert_symbol(y.plus, 2, sym);
      out.minus = conj_field(out.plus);
      break;
    }
    case HodgeOp::D1Star: {
      require_rank(y, 1, "d_inverse(D1Star)");
      out.rank = 0;
      out.f = invert_symbol(y.minus, 0, [](int l) {
        return l == 0 ? 0.0 : -std::sqrt(static_cast<double>(l) * (l + 1)) / kSqrt2;
      });
      break;
    }
    case HodgeOp::D2Star: {
      require_rank(y, 2, "d_inverse(D2Star)");
      out.rank = 1;
      out.plus = invert_symbol(y.plus, 1, [](int l) {
        return l < 2 ? 0.0 : std::sqrt(static_cast<double>(l - 1) * (l + 2)) / kSqrt2;
      });
      out.minus = conj_field(out.plus);
      break;
    }
  }
  return out;
}

double hodge_inner(const HodgeSection& a, const HodgeSection& b) {
  if (a.rank != b.rank) throw ConfigError("hodge_inner: rank mismatch");
  switch (a.rank) {
    case 0:
      return a.metric_scale * std::real(l2_inner(a.f, b.f));
    case 1:
      return 2.0 * std::real(l2_inner(a.plus, b.plus));
    default:
      return 2.0 / a.metric_scale * std::real(l2_inner(a.plus, b.plus));
  }
}

double hodge_norm(const HodgeSection& a) { return std::sqrt(hodge_inner(a, a)); }

double hodge_gradient_norm(const HodgeSection& a) {
  double acc = 0.0;
  double scale_pow = 1.0;
  if (a.rank == 0) {
    acc = 0.5 * (std::pow(l2_norm(eth(a.f)), 2) + std::pow(l2_norm(eth_bar(a.f)), 2));
  } else {
    // Real sections: the minus-component derivatives have the same norms as
    // the conjugate plus-component ones.
    acc = std::pow(l2_norm(eth(a.plus)), 2) + std::pow(l2_norm(eth_bar(a.plus)), 2);
    scale_pow = a.rank == 1 ? a.metric_scale : a.metric_scale * a.metric_scale;
  }
  return std::sqrt(acc / scale_pow);
}

HodgeSection section_add(const HodgeSection& a, const HodgeSection& b) {
  if (a.rank != b.rank) throw ConfigError("section_add: rank mismatch");
  HodgeSection out = a;
  if (a.rank == 0) {
    out.f += b.f;
  } else {
    out.plus += b.plus;
    out.minus += b.minus;
  }
  return out;
}

HodgeSection section_sub(const HodgeSection& a, const HodgeSection& b) {
  return section_add(a, section_scale(b, -1.0));
}

HodgeSection section_scale(const HodgeSection& a, double c) {
  HodgeSection out = a;
  if (a.rank == 0) {
    out.f *= c;
  } else {
    out.plus *= c;
    out.minus *= c;
  }
  return out;
}

}  // namespace nullcone
