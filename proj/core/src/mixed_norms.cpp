#include "nullcone/mixed_norms.hpp"

#include <cmath>
#include <limits>

#include "nullcone/errors.hpp"
#include "nullcone/parallel.hpp"

namespace nullcone {

namespace {

double trapezoid(const std::vector<double>& f, double dt) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) acc += 0.5 * (f[i] + f[i + 1]) * dt;
  return acc;
}

double slice_lq(const FoliationContext& ctx, const TensorField& t, const ConformalFactor& u,
                double q) {
  const auto sq = tf_pointwise_sq(t, u);
  if (std::isinf(q)) {
    double best = 0.0;
    for (double v : sq) best = std::max(best, v);
    return std::sqrt(best);
  }
  const auto& grid = ctx.grid;
  const auto measure = u.exp_values(grid, 2);
  double acc = 0.0;
  for (int i = 0; i < grid->n_theta(); ++i) {
    double row = 0.0;
    for (int j = 0; j < grid->n_phi(); ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * grid->n_phi() + j;
      row += std::pow(sq[idx], 0.5 * q) * measure[idx].real();
    }
    acc += grid->point_weight(i) * row;
  }
  return std::pow(acc, 1.0 / q);
}

}  // namespace

double mixed_norm(const FoliationContext& ctx, const HorizontalField& psi,
                  const MixedNormSpec& spec) {
  ctx.validate();
  if (psi.n_nodes() != ctx.n_nodes()) throw ConfigError("mixed_norm: node count mismatch");
  if (spec.p < 1.0 || spec.q < 1.0)
    throw ParameterError("mixed_norm: exponents must be >= 1");
  const int n = psi.n_nodes();

  if (spec.order == MixedNormSpec::Order::TFirst) {
    std::vector<double> a(n);
    parallel_for(n, [&](std::size_t i) {
      // q = 2 slices are plain L^2 norms; take the coefficient route (which
      // also carries rank-4 gradients).
      a[i] = spec.q == 2.0 ? tf_l2(psi.node[i], ctx.metric.at(i))
                           : slice_lq(ctx, psi.node[i], ctx.metric.at(i), spec.q);
    });
    if (std::isinf(spec.p)) {
      double best = 0.0;
      for (double v : a) best = std::max(best, v);
      return best;
    }
    std::vector<double> ap(n);
    for (int i = 0; i < n; ++i) ap[i] = std::pow(a[i], spec.p);
    return std::pow(trapezoid(ap, ctx.tgrid.dt()), 1.0 / spec.p);
  }

  // x-first norms: pointwise |psi|(tau, x) with the Jacobian weight.
  const auto& grid = ctx.grid;
  const std::size_t npts = grid->n_samples();
  std::vector<std::vector<double>> absval(n);
  parallel_for(n, [&](std::size_t i) {
    auto sq = tf_pointwise_sq(psi.node[i], ctx.metric.at(i));
    for (auto& v : sq) v = std::sqrt(v);
    absval[i] = std::move(sq);
  });

  const bool need_jac = !std::isinf(spec.q);
  std::vector<std::vector<cplx>> jac;
  if (need_jac) {
    const HorizontalField J = jacobian(ctx);
    jac.resize(n);
    parallel_for(n, [&](std::size_t i) { jac[i] = J.node[i].comp[0].values(); });
  }

  std::vector<double> inner(npts, 0.0);
  if (std::isinf(spec.p)) {
    // sup over tau of |psi| J^{1/q} (J dropped when q = infinity).
    for (int i = 0; i < n; ++i) {
      for (std::size_t x = 0; x < npts; ++x) {
        const double w = need_jac ? std::pow(jac[i][x].real(), 1.0 / spec.q) : 1.0;
        inner[x] = std::max(inner[x], absval[i][x] * w);
      }
    }
  } else {
    std::vector<double> tmp(n);
    for (std::size_t x = 0; x < npts; ++x) {
      for (int i = 0; i < n; ++i) {
        const double w = need_jac ? std::pow(jac[i][x].real(), spec.p / spec.q) : 1.0;
        tmp[i] = std::pow(absval[i][x], spec.p) * w;
      }
      inner[x] = std::pow(trapezoid(tmp, ctx.tgrid.dt()), 1.0 / spec.p);
    }
  }

  if (std::isinf(spec.q)) {
    double best = 0.0;
    for (double v : inner) best = std::max(best, v);
    return best;
  }
  // Outer integral against the reference measure d eps[0].
  const auto measure0 = ctx.metric.at(0).exp_values(grid, 2);
  double acc = 0.0;
  for (int i = 0; i < grid->n_theta(); ++i) {
    double row = 0.0;
    for (int j = 0; j < grid->n_phi(); ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * grid->n_phi() + j;
      row += std::pow(inner[idx], spec.q) * measure0[idx].real();
    }
    acc += grid->point_weight(i) * row;
  }
  return std::pow(acc, 1.0 / spec.q);
}

double tensor_sobolev_x(const TensorField& t, const ConformalFactor& u, double s) {
  TensorField lam = t;
  for (auto& c : lam.comp) {
    SpectralField out(c.grid(), c.spin());
    for (int l = std::abs(c.spin()); l <= c.lmax(); ++l) {
      const double w = std::pow(1.0 + bochner_eigenvalue(l, c.spin()), 0.5 * s);
      for (int m = -l; m <= l; ++m) out.set_coeff(l, m, w * c.coeff(l, m));
    }
    c = std::move(out);
  }
  return tf_l2(lam, u);
}

double tensor_besov_x(const TensorField& t, const ConformalFactor& u, const LPProfile& prof,
                      double a, double s) {
  if (!(a >= 1.0)) throw ParameterError("tensor_besov_x: summability a must be >= 1");
  auto project = [&](int k, bool below) {
    TensorField out = t;
    for (auto& c : out.comp)
      c = below ? lp_project_below_zero(c, prof) : lp_project(c, prof, k);
    return out;
  };
  const double low = tf_l2(project(0, true), u);
  if (std::isinf(a)) {
    double best = low;
    for (int k = 0; k <= prof.k_max(); ++k)
      best = std::max(best, std::pow(2.0, s * k) * tf_l2(project(k, false), u));
    return best;
  }
  double acc = std::pow(low, a);
  for (int k = 0; k <= prof.k_max(); ++k)
    acc += std::pow(2.0, a * s * k) * std::pow(tf_l2(project(k, false), u), a);
  return std::pow(acc, 1.0 / a);
}

double besov_mixed_norm(const FoliationContext& ctx, const HorizontalField& psi,
                        const LPProfile& prof, double a, double p, double s) {
  if (!(a >= 1.0)) throw ParameterError("besov_mixed_norm: summability a must be >= 1");
  MixedNormSpec l_p2{MixedNormSpec::Order::TFirst, p, 2.0};
  auto banded = [&](int k, bool below) {
    HorizontalField out = psi;
    for (auto& node : out.node)
      for (auto& c : node.comp)
        c = below ? lp_project_below_zero(c, prof) : lp_project(c, prof, k);
    return mixed_norm(ctx, out, l_p2);
  };
  const double low = banded(0, true);
  if (std::isinf(a)) {
    double best = low;
    for (int k = 0; k <= prof.k_max(); ++k)
      best = std::max(best, std::pow(2.0, s * k) * banded(k, false));
    return best;
  }
  double acc = std::pow(low, a);
  for (int k = 0; k <= prof.k_max(); ++k)
    acc += std::pow(2.0, a * s * k) * std::pow(banded(k, false), a);
  return std::pow(acc, 1.0 / a);
}

double n1_norm(const FoliationContext& ctx, const HorizontalField& psi) {
  const MixedNormSpec l22{MixedNormSpec::Order::TFirst, 2.0, 2.0};
  HorizontalField grad;
  grad.node.resize(psi.n_nodes());
  parallel_for(psi.n_nodes(), [&](std::size_t i) {
    grad.node[i] = tf_gradient(psi.node[i], ctx.metric.at(i));
  });
  return mixed_norm(ctx, nabla_t_any(ctx, psi), l22) + mixed_norm(ctx, grad, l22) +
         mixed_norm(ctx, psi, l22);
}

double n1i_norm(const FoliationContext& ctx, const HorizontalField& psi) {
  return n1_norm(ctx, psi) + tensor_sobolev_x(psi.node[0], ctx.metric.at(0), 0.5);
}

double n0star_upper(const FoliationContext& ctx, const HorizontalField& psi,
                    const std::vector<TensorField>& extra_initial) {
  const HorizontalField base = cint(ctx, psi, 0);
  double best = n1i_norm(ctx, base);
  for (const auto& f0 : extra_initial) {
    const HorizontalField shift = parallel_transport(ctx, f0);
    best = std::min(best, n1i_norm(ctx, hf_add(base, shift)));
  }
  const CutoffPair cutoffs(ctx.tgrid.t_max());
  best = std::min(best, n1i_norm(ctx, cint_star(ctx, psi, cutoffs)));
  return best;
}

double sum_norm_upper(const FoliationContext& ctx, const HorizontalField& part_a,
                      const HorizontalField& part_b, const LPProfile& prof) {
  const HorizontalField whole = hf_add(part_a, part_b);
  double best = std::min(n0star_upper(ctx, whole),
                         besov_mixed_norm(ctx, whole, prof, 2.0, 2.0, 0.0));
  best = std::min(best, n0star_upper(ctx, part_a) +
                            besov_mixed_norm(ctx, part_b, prof, 2.0, 2.0, 0.0));
  return best;
}

NNormReport n_norms(const FoliationContext& ctx, const HorizontalField& psi,
                    const LPProfile& prof, const std::vector<TensorField>& extra_initial) {
  NNormReport r;
  r.n1 = n1_norm(ctx, psi);
  r.n1i = r.n1 + tensor_sobolev_x(psi.node[0], ctx.metric.at(0), 0.5);
  r.n0star_upper = n0star_upper(ctx, psi, extra_initial);
  const HorizontalField zero = hf_zero(ctx.grid, ctx.n_nodes(), psi.rank(), psi.contra_mask());
  r.sum_norm_upper = sum_norm_upper(ctx, psi, zero, prof);
  return r;
}

}  // namespace nullcone
