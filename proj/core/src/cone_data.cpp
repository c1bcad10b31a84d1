#include "nullcone/cone_data.hpp"

#include <cmath>

#include "nullcone/errors.hpp"
#include "nullcone/mixed_norms.hpp"
#include "nullcone/parallel.hpp"

namespace nullcone {

namespace {
const double kSqrt4Pi = std::sqrt(4.0 * 3.14159265358979323846);
const double kFourPi = 4.0 * 3.14159265358979323846;

// integral of f over the measure e^{2U} dOmega.
double weighted_integral(const GridPtr& grid, const SpectralField& f,
                         const ConformalFactor& U) {
  if (U.constant())
    return std::real(f.coeff(0, 0)) * kSqrt4Pi * std::exp(2.0 * U.constant_value());
  const auto v = f.values();
  const auto w = U.exp_values(grid, 2);
  double acc = 0.0;
  for (int i = 0; i < grid->n_theta(); ++i) {
    double row = 0.0;
    for (int j = 0; j < grid->n_phi(); ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * grid->n_phi() + j;
      row += std::real(v[idx]) * w[idx].real();
    }
    acc += grid->point_weight(i) * row;
  }
  return acc;
}

}  // namespace

SpectralField constant_field(const GridPtr& grid, cplx value) {
  SpectralField f(grid, 0);
  f.set_coeff(0, 0, value * kSqrt4Pi);
  return f;
}

std::vector<SpectralField> constant_logs(const GridPtr& grid, const std::vector<double>& v) {
  std::vector<SpectralField> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(constant_field(grid, x));
  return out;
}

void PhysicalConeData::validate() const {
  if (!grid) throw IncompleteDataError("PhysicalConeData: missing grid");
  const int n = tgrid.n_nodes();
  if (static_cast<int>(metric_log.size()) != n)
    throw IncompleteDataError("PhysicalConeData: metric log node count");
  for (const HorizontalField* f :
       {&chi, &zeta, &chibar, &alpha, &beta, &rho, &sigma, &betabar, &mu}) {
    if (f->n_nodes() != n) throw IncompleteDataError("PhysicalConeData: missing field");
  }
}

void RenormalizedConeData::validate() const {
  if (!grid) throw IncompleteDataError("RenormalizedConeData: missing grid");
  const int n = tgrid.n_nodes();
  if (static_cast<int>(metric_log.size()) != n)
    throw IncompleteDataError("RenormalizedConeData: metric log node count");
  for (const HorizontalField* f : {&H, &Z, &Hbar, &A, &B, &R, &Bbar, &M, &grad_trH}) {
    if (f->n_nodes() != n) throw IncompleteDataError("RenormalizedConeData: missing field");
  }
}

FoliationContext RenormalizedConeData::context() const {
  FoliationContext ctx;
  ctx.grid = grid;
  ctx.tgrid = tgrid;
  ctx.metric = conformal_metric(metric_log);
  ctx.sff.k = H;
  return ctx;
}

FoliationContext physical_context(const PhysicalConeData& phys) {
  FoliationContext ctx;
  ctx.grid = phys.grid;
  ctx.tgrid = phys.tgrid;
  ctx.metric = conformal_metric(phys.metric_log);
  ctx.sff.k = phys.chi;
  return ctx;
}

PhysicalConeData schwarzschild_exact(double m, double s0, const GridPtr& grid,
                                     const TimeGrid& tgrid) {
  const AffineChart chart(s0, m);
  PhysicalConeData out;
  out.chart = chart;
  out.grid = grid;
  out.tgrid = tgrid;
  const int n = tgrid.n_nodes();
  out.metric_log.reserve(n);

  out.chi = hf_zero(grid, n, 2);
  out.zeta = hf_zero(grid, n, 1);
  out.chibar = hf_zero(grid, n, 2);
  out.alpha = hf_zero(grid, n, 2);
  out.beta = hf_zero(grid, n, 1);
  out.rho = hf_zero(grid, n, 0);
  out.sigma = hf_zero(grid, n, 0);
  out.betabar = hf_zero(grid, n, 1);
  out.mu = hf_zero(grid, n, 0);

  for (int i = 0; i < n; ++i) {
    const double s = chart.s_of_t(tgrid.node(i));
    out.metric_log.push_back(constant_field(grid, std::log(s)));
    // chi = g/s: mixed component s^{-1} e^{2U} = s.
    out.chi.node[i].comp[1] = constant_field(grid, s);
    out.chi.node[i].comp[2] = out.chi.node[i].comp[1];
    // chibar = -(1 - 2m/s) g/s: mixed component -(s - 2m).
    out.chibar.node[i].comp[1] = constant_field(grid, -(s - 2.0 * m));
    out.chibar.node[i].comp[2] = out.chibar.node[i].comp[1];
    out.rho.node[i].comp[0] = constant_field(grid, -2.0 * m / (s * s * s));
    out.mu.node[i].comp[0] = constant_field(grid, 2.0 * m / (s * s * s));
  }
  return out;
}

RenormalizedConeData renormalize(const PhysicalConeData& phys) {
  phys.validate();
  const AffineChart& chart = phys.chart;
  RenormalizedConeData out;
  out.chart = chart;
  out.grid = phys.grid;
  out.tgrid = phys.tgrid;
  const int n = phys.n_nodes();
  out.metric_log.reserve(n);

  out.H = hf_zero(phys.grid, n, 2);
  out.Z = hf_zero(phys.grid, n, 1);
  out.Hbar = hf_zero(phys.grid, n, 2);
  out.A = hf_zero(phys.grid, n, 2);
  out.B = hf_zero(phys.grid, n, 1);
  out.R = hf_zero(phys.grid, n, 0);
  out.Bbar = hf_zero(phys.grid, n, 1);
  out.M = hf_zero(phys.grid, n, 0);
  out.grad_trH = hf_zero(phys.grid, n, 1);

  const double s0 = chart.s0;
  const double m = chart.m;
  for (int i = 0; i < n; ++i) {
    const double s = chart.s_of_t(phys.tgrid.node(i));
    out.metric_log.push_back(phys.metric_log[i] -
                             constant_field(phys.grid, std::log(s)));
    const ConformalFactor U(phys.metric_log[i]);
    const SpectralField e2U = U.apply_exp(constant_field(phys.grid, 1.0), 2);

    // H = (chi - g/s)/s0.
    out.H.node[i] = tf_scale(phys.chi.node[i], 1.0 / s0);
    out.H.node[i].comp[1] -= (1.0 / (s * s0)) * e2U;
    out.H.node[i].comp[2] -= (1.0 / (s * s0)) * e2U;
    // Z = s zeta / s0.
    out.Z.node[i] = tf_scale(phys.zeta.node[i], s / s0);
    // Hbar = chibar/s + (1 - 2m/s) g / s^2.
    out.Hbar.node[i] = tf_scale(phys.chibar.node[i], 1.0 / s);
    {
      const double c = (1.0 - 2.0 * m / s) / (s * s);
      out.Hbar.node[i].comp[1] += c * e2U;
      out.Hbar.node[i].comp[2] += c * e2U;
    }
    out.A.node[i] = tf_scale(phys.alpha.node[i], s * s / (s0 * s0));
    out.B.node[i] = tf_scale(phys.beta.node[i], s * s * s / (s0 * s0));
    // R = [s^3 (rho + i sigma) + 2m] / s0.
    out.R.node[i].comp[0] = (s * s * s / s0) * phys.rho.node[i].comp[0] +
                            cplx(0.0, s * s * s / s0) * phys.sigma.node[i].comp[0] +
                            constant_field(phys.grid, 2.0 * m / s0);
    out.Bbar.node[i] = tf_scale(phys.betabar.node[i], s);
    // M = (s^3 mu - 2m) / s0.
    out.M.node[i].comp[0] = (s * s * s / s0) * phys.mu.node[i].comp[0] -
                            constant_field(phys.grid, 2.0 * m / s0);
  }
  for (int i = 0; i < n; ++i) {
    const ConformalFactor u(out.metric_log[i]);
    const SpectralField tr = tf_trace2(out.H.node[i], u);
    out.grad_trH.node[i] = tf_gradient(make_scalar(tr), u);
  }
  return out;
}

PhysicalConeData derenormalize(const RenormalizedConeData& ren) {
  ren.validate();
  const AffineChart& chart = ren.chart;
  PhysicalConeData out;
  out.chart = chart;
  out.grid = ren.grid;
  out.tgrid = ren.tgrid;
  const int n = ren.n_nodes();
  out.metric_log.reserve(n);

  out.chi = hf_zero(ren.grid, n, 2);
  out.zeta = hf_zero(ren.grid, n, 1);
  out.chibar = hf_zero(ren.grid, n, 2);
  out.alpha = hf_zero(ren.grid, n, 2);
  out.beta = hf_zero(ren.grid, n, 1);
  out.rho = hf_zero(ren.grid, n, 0);
  out.sigma = hf_zero(ren.grid, n, 0);
  out.betabar = hf_zero(ren.grid, n, 1);
  out.mu = hf_zero(ren.grid, n, 0);

  const double s0 = chart.s0;
  const double m = chart.m;
  for (int i = 0; i < n; ++i) {
    const double s = chart.s_of_t(ren.tgrid.node(i));
    out.metric_log.push_back(ren.metric_log[i] +
                             constant_field(ren.grid, std::log(s)));
    const ConformalFactor U(out.metric_log[i]);
    const SpectralField e2U = U.apply_exp(constant_field(ren.grid, 1.0), 2);

    out.chi.node[i] = tf_scale(ren.H.node[i], s0);
    out.chi.node[i].comp[1] += (1.0 / s) * e2U;
    out.chi.node[i].comp[2] += (1.0 / s) * e2U;
    out.zeta.node[i] = tf_scale(ren.Z.node[i], s0 / s);
    out.chibar.node[i] = tf_scale(ren.Hbar.node[i], s);
    {
      const double c = (1.0 - 2.0 * m / s) / s;
      out.chibar.node[i].comp[1] -= c * e2U;
      out.chibar.node[i].comp[2] -= c * e2U;
    }
    out.alpha.node[i] = tf_scale(ren.A.node[i], s0 * s0 / (s * s));
    out.beta.node[i] = tf_scale(ren.B.node[i], s0 * s0 / (s * s * s));
    {
      SpectralField p = (s0 / (s * s * s)) * ren.R.node[i].comp[0] -
                        constant_field(ren.grid, 2.0 * m / (s * s * s));
      const SpectralField pc = conj_field(p);
      out.rho.node[i].comp[0] = 0.5 * (p + pc);
      out.sigma.node[i].comp[0] = cplx(0.0, -0.5) * (p - pc);
    }
    out.betabar.node[i] = tf_scale(ren.Bbar.node[i], 1.0 / s);
    out.mu.node[i].comp[0] = (s0 / (s * s * s)) * ren.M.node[i].comp[0] +
                             constant_field(ren.grid, 2.0 * m / (s * s * s));
  }
  return out;
}

SpectralField slashed_trace_chi(const PhysicalConeData& phys, int i) {
  const ConformalFactor u(phys.metric_log[i]);
  return tf_trace2(phys.chi.node[i], u);
}

MassAspectCheck mass_aspect(const PhysicalConeData& phys) {
  phys.validate();
  const int n = phys.n_nodes();
  MassAspectCheck out;
  out.recomputed = hf_zero(phys.grid, n, 0);
  parallel_for(n, [&](std::size_t i) {
    const ConformalFactor u(phys.metric_log[i]);
    const TensorField grad_zeta = tf_gradient(phys.zeta.node[i], u);
    const SpectralField div_zeta = tf_contract(grad_zeta, 0, 1, u).comp[0];
    const TensorField chih = tf_tracefree2(phys.chi.node[i]);
    const TensorField chibarh = tf_tracefree2(phys.chibar.node[i]);
    const SpectralField pair =
        tf_contract(tf_contract_pair(chih, 0, chibarh, 0, u), 0, 1, u).comp[0];
    out.recomputed.node[i].comp[0] =
        cplx(-1.0, 0.0) * div_zeta - phys.rho.node[i].comp[0] + 0.5 * pair;
  });
  const FoliationContext ctx = physical_context(phys);
  out.residual = mixed_norm(ctx, hf_sub(out.recomputed, phys.mu),
                            {MixedNormSpec::Order::TFirst, 2.0, 2.0});
  return out;
}

double hawking_mass(const PhysicalConeData& phys, int i) {
  const ConformalFactor U(phys.metric_log[i]);
  const double area =
      weighted_integral(phys.grid, constant_field(phys.grid, 1.0), U);
  const double r = std::sqrt(area / kFourPi);
  const double integral = weighted_integral(phys.grid, phys.mu.node[i].comp[0], U);
  return r / (8.0 * 3.14159265358979323846) * integral;
}

double hawking_mass_expansion_form(const PhysicalConeData& phys, int i) {
  const ConformalFactor U(phys.metric_log[i]);
  const SpectralField tr_chi = tf_trace2(phys.chi.node[i], U);
  const SpectralField tr_chibar = tf_trace2(phys.chibar.node[i], U);
  const double area =
      weighted_integral(phys.grid, constant_field(phys.grid, 1.0), U);
  const double r = std::sqrt(area / kFourPi);
  const double integral =
      weighted_integral(phys.grid, multiply(tr_chi, tr_chibar), U);
  return 0.5 * r * (1.0 + integral / (16.0 * 3.14159265358979323846));
}

std::vector<double> radius_ratio(const RenormalizedConeData& ren) {
  const FoliationContext ctx = ren.context();
  const HorizontalField J = jacobian(ctx);
  const ConformalFactor u0(ren.metric_log[0]);
  std::vector<double> out(ren.n_nodes());
  for (int i = 0; i < ren.n_nodes(); ++i) {
    const double integral =
        weighted_integral(ren.grid, J.node[i].comp[0], u0);
    out[i] = std::sqrt(integral / kFourPi);
  }
  return out;
}

}  // namespace nullcone
