#include "nullcone/foliation.hpp"

#include <cmath>

#include "nullcone/errors.hpp"
#include "nullcone/parallel.hpp"

namespace nullcone {

namespace {

std::vector<FdStencil> stencils_for(const FoliationContext& ctx) {
  return derivative_stencils(ctx.tgrid.nodes(), ctx.tgrid.scheme_order());
}

}  // namespace

HorizontalField lie_t(const FoliationContext& ctx, const HorizontalField& psi) {
  ctx.validate();
  if (psi.n_nodes() != ctx.n_nodes()) throw ConfigError("lie_t: node count mismatch");
  if (psi.n_nodes() < 2) throw DegenerateInputError("lie_t: single-node field");
  const auto st = stencils_for(ctx);
  HorizontalField out;
  out.node.resize(psi.n_nodes());
  parallel_for(psi.n_nodes(), [&](std::size_t i) {
    TensorField acc = tf_scale(psi.node[st[i].first], st[i].w[0]);
    for (std::size_t j = 1; j < st[i].w.size(); ++j)
      acc = tf_axpy(st[i].w[j], psi.node[st[i].first + j], acc);
    out.node[i] = std::move(acc);
  });
  return out;
}

HorizontalField nabla_t_any(const FoliationContext& ctx, const HorizontalField& psi) {
  HorizontalField out = lie_t(ctx, psi);
  if (psi.rank() == 0) return out;
  parallel_for(psi.n_nodes(), [&](std::size_t i) {
    out.node[i] = tf_add(out.node[i],
                         tf_k_correction(psi.node[i], ctx.sff.k.node[i], ctx.metric.at(i)));
  });
  return out;
}

HorizontalField nabla_t(const FoliationContext& ctx, const HorizontalField& psi) {
  if (psi.rank() > 2) throw UnsupportedRankError("nabla_t: total rank above 2");
  return nabla_t_any(ctx, psi);
}

namespace {

// One RK4 march of nabla_t Y = rhs from node i to node i + dir, dir = +-1.
// Data (rhs, k, u) at the stage midpoint comes from 4-point interpolation.
TensorField rk4_step(const FoliationContext& ctx, const HorizontalField* rhs,
                     const TensorField& y, int i, int dir) {
  const double dt = dir * ctx.tgrid.dt();
  const int mid = dir > 0 ? i : i - 1;
  const int j = i + dir;

  const TensorField k_mid = interp_midpoint(ctx.sff.k, mid);
  const ConformalFactor u_mid = interp_midpoint_factor(ctx.metric, mid, ctx.grid);
  TensorField rhs_mid;
  if (rhs) rhs_mid = interp_midpoint(*rhs, mid);

  auto f = [&](const TensorField& state, const TensorField& k_at,
               const ConformalFactor& u_at, const TensorField* r) {
    TensorField d = tf_scale(tf_k_correction(state, k_at, u_at), -1.0);
    if (r) d = tf_add(d, *r);
    return d;
  };

  const TensorField k1 = f(y, ctx.sff.k.node[i], ctx.metric.at(i), rhs ? &rhs->node[i] : nullptr);
  const TensorField y2 = tf_axpy(0.5 * dt, k1, y);
  const TensorField k2 = f(y2, k_mid, u_mid, rhs ? &rhs_mid : nullptr);
  const TensorField y3 = tf_axpy(0.5 * dt, k2, y);
  const TensorField k3 = f(y3, k_mid, u_mid, rhs ? &rhs_mid : nullptr);
  const TensorField y4 = tf_axpy(dt, k3, y);
  const TensorField k4 = f(y4, ctx.sff.k.node[j], ctx.metric.at(j), rhs ? &rhs->node[j] : nullptr);

  TensorField incr = tf_add(k1, k4);
  incr = tf_axpy(2.0, k2, incr);
  incr = tf_axpy(2.0, k3, incr);
  return tf_axpy(dt / 6.0, incr, y);
}

HorizontalField integrate_from(const FoliationContext& ctx, const HorizontalField* rhs,
                               const TensorField& y0, int from) {
  ctx.validate();
  if (ctx.n_nodes() < 4)
    throw DegenerateInputError("covariant integral: at least four nodes required");
  HorizontalField out;
  out.node.resize(ctx.n_nodes());
  out.node[from] = y0;
  for (int i = from; i + 1 < ctx.n_nodes(); ++i)
    out.node[i + 1] = rk4_step(ctx, rhs, out.node[i], i, +1);
  for (int i = from; i > 0; --i)
    out.node[i - 1] = rk4_step(ctx, rhs, out.node[i], i, -1);
  return out;
}

}  // namespace

HorizontalField cint(const FoliationContext& ctx, const HorizontalField& psi, int from) {
  if (from < 0 || from >= ctx.n_nodes()) throw ParameterError("cint: node index off grid");
  return integrate_from(ctx, &psi, zero_tensor(psi.grid(), psi.rank(), psi.contra_mask()),
                        from);
}

HorizontalField cint_at(const FoliationContext& ctx, const HorizontalField& psi, double tau) {
  return cint(ctx, psi, ctx.tgrid.index_of(tau));
}

HorizontalField cint_star(const FoliationContext& ctx, const HorizontalField& psi,
                          const CutoffPair& cutoffs) {
  std::vector<double> wp(ctx.n_nodes()), wm(ctx.n_nodes());
  for (int i = 0; i < ctx.n_nodes(); ++i) {
    wp[i] = cutoffs.eta_plus(ctx.tgrid.node(i));
    wm[i] = cutoffs.eta_minus(ctx.tgrid.node(i));
  }
  const HorizontalField up = cint(ctx, hf_scale_per_node(psi, wp), 0);
  const HorizontalField dn = cint(ctx, hf_scale_per_node(psi, wm), ctx.n_nodes() - 1);
  return hf_sub(up, dn);
}

HorizontalField parallel_transport(const FoliationContext& ctx, const TensorField& f0) {
  return integrate_from(ctx, nullptr, f0, 0);
}

HorizontalField jacobian(const FoliationContext& ctx) {
  ctx.validate();
  if (ctx.sff.k.n_nodes() == 0) {
    // Static metric: J is identically one.
    HorizontalField out;
    SpectralField one(ctx.grid, 0);
    one.set_coeff(0, 0, std::sqrt(4.0 * 3.14159265358979323846));
    for (int i = 0; i < ctx.n_nodes(); ++i) out.node.push_back(make_scalar(one));
    return out;
  }
  HorizontalField trk;
  trk.node.reserve(ctx.n_nodes());
  for (int i = 0; i < ctx.n_nodes(); ++i)
    trk.node.push_back(make_scalar(ctx.sff.trace(ctx.metric, i)));
  HorizontalField integral = cint(ctx, trk, 0);
  HorizontalField out;
  out.node.reserve(ctx.n_nodes());
  for (int i = 0; i < ctx.n_nodes(); ++i) {
    const auto v = integral.node[i].comp[0].values();
    std::vector<cplx> e(v.size());
    for (std::size_t p = 0; p < v.size(); ++p) e[p] = std::exp(v[p].real());
    out.node.push_back(make_scalar(analyze(ctx.grid, 0, e)));
  }
  return out;
}

TensorField metric_tensor(const FoliationContext& ctx, int i) {
  SpectralField one(ctx.grid, 0);
  one.set_coeff(0, 0, std::sqrt(4.0 * 3.14159265358979323846));
  return tf_pure_trace2(one, ctx.metric.at(i));
}

TensorField volume_form(const FoliationContext& ctx, int i) {
  SpectralField one(ctx.grid, 0);
  one.set_coeff(0, 0, std::sqrt(4.0 * 3.14159265358979323846));
  SpectralField e2u = ctx.metric.at(i).apply_exp(one, 2);
  TensorField out = zero_tensor(ctx.grid, 2);
  out.comp[2] = cplx(0.0, -1.0) * e2u;  // (m, mbar) slot pattern
  out.comp[1] = cplx(0.0, 1.0) * e2u;
  return out;
}

namespace {

double l22_of(const FoliationContext& ctx, const HorizontalField& f) {
  double acc = 0.0;
  std::vector<double> sq(f.n_nodes());
  parallel_for(f.n_nodes(), [&](std::size_t i) {
    const double v = tf_l2(f.node[i], ctx.metric.at(i));
    sq[i] = v * v;
  });
  for (int i = 0; i + 1 < f.n_nodes(); ++i)
    acc += 0.5 * (sq[i] + sq[i + 1]) * ctx.tgrid.dt();
  return std::sqrt(acc);
}

// c_{abc} = grad_b k_{ac} - grad_c k_{ab}.
HorizontalField sff_curl(const FoliationContext& ctx) {
  HorizontalField out;
  out.node.resize(ctx.n_nodes());
  parallel_for(ctx.n_nodes(), [&](std::size_t i) {
    const TensorField g = tf_gradient(ctx.sff.k.node[i], ctx.metric.at(i));  // [b, a, c]
    const TensorField a1 = tf_transpose(g, 0, 1);                            // [a, b, c]
    TensorField a2 = tf_transpose(g, 0, 1);                                  // [a, c, b]
    a2 = tf_transpose(a2, 1, 2);                                             // [a, b, c] of grad_c k_{ab}
    out.node[i] = tf_sub(a1, a2);
  });
  return out;
}

}  // namespace

double commutator_residual(const FoliationContext& ctx, const HorizontalField& psi,
                           CommutatorKind which) {
  ctx.validate();
  if (psi.rank() > 1 || psi.contra_mask() != 0)
    throw UnsupportedRankError("commutator_residual: rank 0 or 1 covariant fields only");

  // grad psi per node.
  HorizontalField grad;
  grad.node.resize(psi.n_nodes());
  parallel_for(psi.n_nodes(), [&](std::size_t i) {
    grad.node[i] = tf_gradient(psi.node[i], ctx.metric.at(i));
  });

  HorizontalField lhs, rhs;
  switch (which) {
    case CommutatorKind::LieGrad: {
      // [lie_t, grad] psi = -gamma^{cd}(grad_a k_{uc} + grad_u k_{ac} - grad_c k_{au}) psi_d
      HorizontalField gl = lie_t(ctx, grad);
      HorizontalField lg = lie_t(ctx, psi);
      HorizontalField glg;
      glg.node.resize(psi.n_nodes());
      parallel_for(psi.n_nodes(), [&](std::size_t i) {
        glg.node[i] = tf_gradient(lg.node[i], ctx.metric.at(i));
      });
      lhs = hf_sub(gl, glg);
      rhs = hf_zero(ctx.grid, ctx.n_nodes(), psi.rank() == 0 ? 0 : 2);
      if (psi.rank() == 1) {
        parallel_for(psi.n_nodes(), [&](std::size_t i) {
          const auto& u = ctx.metric.at(i);
          // g slots: [deriv, k1, k2], g_{bac} = grad_b k_{ac}.
          const TensorField g = tf_gradient(ctx.sff.k.node[i], u);
          // W_{auc} = grad_a k_{uc} + grad_u k_{ac} - grad_c k_{au}, slots [a, u, c].
          const TensorField grad_a_kuc = g;                     // (a, u, c) as stored
          const TensorField grad_u_kac = tf_transpose(g, 0, 1); // (u, a, c) -> (a, u, c)
          TensorField grad_c_kau = tf_transpose(g, 0, 1);       // (c, a, u) -> (a, c, u)
          grad_c_kau = tf_transpose(grad_c_kau, 1, 2);          // -> (a, u, c)
          TensorField W = tf_add(grad_a_kuc, grad_u_kac);
          W = tf_sub(W, grad_c_kau);
          rhs.node[i] = tf_scale(tf_contract_pair(W, 2, psi.node[i], 0, u), -1.0);
        });
      }
      break;
    }
    case CommutatorKind::NablaTGrad: {
      HorizontalField gl = nabla_t_any(ctx, grad);
      HorizontalField ng = nabla_t_any(ctx, psi);
      HorizontalField gng;
      gng.node.resize(psi.n_nodes());
      parallel_for(psi.n_nodes(), [&](std::size_t i) {
        gng.node[i] = tf_gradient(ng.node[i], ctx.metric.at(i));
      });
      lhs = hf_sub(gl, gng);
      const HorizontalField curl = sff_curl(ctx);
      rhs.node.resize(psi.n_nodes());
      parallel_for(psi.n_nodes(), [&](std::size_t i) {
        const auto& u = ctx.metric.at(i);
        // -gamma^{cd} k_{ac} grad_d psi
        TensorField term = tf_scale(
            tf_contract_pair(ctx.sff.k.node[i], 1, grad.node[i], 0, u), -1.0);
        if (psi.rank() == 1) {
          // - gamma^{cd} c_{a u c} psi_d; curl slots [a, b, c].
          term = tf_sub(term,
                        tf_contract_pair(curl.node[i], 2, psi.node[i], 0, u));
        }
        rhs.node[i] = term;
      });
      break;
    }
    case CommutatorKind::CintGrad: {
      const HorizontalField ci = cint(ctx, psi, 0);
      HorizontalField gci;
      gci.node.resize(psi.n_nodes());
      parallel_for(psi.n_nodes(), [&](std::size_t i) {
        gci.node[i] = tf_gradient(ci.node[i], ctx.metric.at(i));
      });
      lhs = hf_sub(cint(ctx, grad, 0), gci);
      const HorizontalField curl = sff_curl(ctx);
      HorizontalField inner;
      inner.node.resize(psi.n_nodes());
      parallel_for(psi.n_nodes(), [&](std::size_t i) {
        const auto& u = ctx.metric.at(i);
        TensorField term = tf_contract_pair(ctx.sff.k.node[i], 1, gci.node[i], 0, u);
        if (psi.rank() == 1)
          term = tf_add(term, tf_contract_pair(curl.node[i], 2, ci.node[i], 0, u));
        inner.node[i] = term;
      });
      rhs = cint(ctx, inner, 0);
      break;
    }
  }
  return l22_of(ctx, hf_sub(lhs, rhs));
}

double conformal_transport_check(const FoliationContext& ctx, const HorizontalField& psi,
                                 const std::vector<double>& w) {
  ctx.validate();
  if (static_cast<int>(w.size()) != ctx.n_nodes())
    throw ConfigError("conformal_transport_check: weight count mismatch");
  const double sq4pi = std::sqrt(4.0 * 3.14159265358979323846);

  // Barred metric factors and sff: kbar = e^{2w} k + (lie_t w) gbar.
  FoliationContext barred = ctx;
  std::vector<double> dw(w.size());
  {
    const auto st = derivative_stencils(ctx.tgrid.nodes(), ctx.tgrid.scheme_order());
    for (std::size_t i = 0; i < w.size(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < st[i].w.size(); ++j) acc += st[i].w[j] * w[st[i].first + j];
      dw[i] = acc;
    }
  }
  for (int i = 0; i < ctx.n_nodes(); ++i) {
    SpectralField ubar(ctx.grid, 0);
    if (ctx.metric.at(i).has_grid()) ubar = ctx.metric.at(i).u();
    SpectralField shift(ctx.grid, 0);
    shift.set_coeff(0, 0, (w[i] + (ctx.metric.at(i).has_grid() ? 0.0 : ctx.metric.at(i).constant_value())) * sq4pi);
    ubar += shift;
    barred.metric.factor[i] = ConformalFactor(ubar);
    SpectralField half_dw(ctx.grid, 0);
    half_dw.set_coeff(0, 0, dw[i] * sq4pi);
    TensorField kbar = tf_scale(ctx.sff.k.node[i], std::exp(2.0 * w[i]));
    kbar = tf_add(kbar, tf_pure_trace2(half_dw, barred.metric.at(i)));
    barred.sff.k.node[i] = kbar;
  }

  const int weight = psi.weight_l_minus_r();
  std::vector<double> ew(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) ew[i] = std::exp(weight * w[i]);
  const HorizontalField lhs = nabla_t_any(barred, hf_scale_per_node(psi, ew));
  const HorizontalField rhs = hf_scale_per_node(nabla_t_any(ctx, psi), ew);
  return l22_of(ctx, hf_sub(lhs, rhs));
}

}  // namespace nullcone
