#include "nullcone/structure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "nullcone/errors.hpp"
#include "nullcone/parallel.hpp"

namespace nullcone {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr int kNumEq = 12;

const char* kEqNames[kNumEq] = {
    "H_evolution", "Z_evolution", "Hbar_evolution", "D2_elliptic",
    "D1_elliptic", "codazzi",     "gauss",          "grad_trH_evolution",
    "M_evolution", "B_bianchi",   "R_bianchi",      "Bbar_bianchi"};
const char* kEqGroups[kNumEq] = {
    "evolution", "evolution",     "evolution",            "elliptic",
    "elliptic",  "gauss_codazzi", "gauss_codazzi",        "derivative_evolution",
    "derivative_evolution",       "bianchi", "bianchi",   "bianchi"};
const int kEqRank[kNumEq] = {2, 1, 2, 1, 0, 3, 0, 1, 0, 1, 0, 1};

SpectralField re_part(const SpectralField& f) { return 0.5 * (f + conj_field(f)); }
SpectralField im_part(const SpectralField& f) {
  return cplx(0.0, -0.5) * (f - conj_field(f));
}

// div - i curl of a 1-form, as a complex scalar field.
SpectralField d1_scalar(const TensorField& x, const ConformalFactor& u) {
  const TensorField g = tf_gradient(x, u);
  return tf_contract(g, 0, 1, u).comp[0] -
         cplx(0.0, 1.0) * tf_contract_eps(g, 0, 1, u).comp[0];
}

// gamma^{bc} grad_b V_{ac}.
TensorField d2_oneform(const TensorField& v, const ConformalFactor& u) {
  return tf_contract(tf_gradient(v, u), 0, 2, u);
}

// (D1* f)_a = -grad_a Re f - eps_a^c grad_c Im f; conformally invariant.
TensorField d1star_oneform(const SpectralField& f, const GridPtr& grid) {
  TensorField out = zero_tensor(grid, 1);
  out.comp[0] = (1.0 / kSqrt2) * eth(conj_field(f));
  out.comp[1] = (1.0 / kSqrt2) * eth_bar(f);
  return out;
}

// eps_a^b X_b (quarter turn), conformally invariant.
TensorField rot_oneform(const TensorField& x) {
  TensorField out = x;
  out.comp[0] = cplx(0.0, -1.0) * x.comp[0];
  out.comp[1] = cplx(0.0, 1.0) * x.comp[1];
  return out;
}

TensorField sym2(const TensorField& t) { return tf_add(t, tf_transpose(t, 0, 1)); }

// Gauss curvature of the conformal metric e^{2u} x round: e^{-2u}(1 - Lap u).
SpectralField metric_gauss_curvature(const ConformalFactor& u, const GridPtr& grid) {
  if (!u.has_grid()) return constant_field(grid, std::exp(-2.0 * u.constant_value()));
  SpectralField inner = constant_field(grid, 1.0) - laplacian(u.u());
  return u.apply_exp(inner, -2);
}

// <V, W>: the double gamma contraction of two rank-2 tensors.
SpectralField pair2(const TensorField& v, const TensorField& w, const ConformalFactor& u) {
  return tf_contract(tf_contract_pair(v, 0, w, 0, u), 0, 1, u).comp[0];
}

// One slice of connection/curvature data in either picture. The renormalized
// picture carries om = 1 - t, o2m = 1 - 2m/s, shift = 2m/s0 and the extra
// o2m-proportional terms; the physical equations are recovered with
// renormalized = false, om = 1.
struct SliceFields {
  const TensorField* chi2 = nullptr;  // H or chi
  const TensorField* one = nullptr;   // Z or zeta
  const TensorField* bar2 = nullptr;  // Hbar or chibar
  const TensorField* a2 = nullptr;    // A or alpha
  const TensorField* b1 = nullptr;    // B or beta
  const TensorField* bb1 = nullptr;   // Bbar or betabar
  const SpectralField* scal = nullptr;  // R or rho + i sigma
  const SpectralField* mass = nullptr;  // M or mu
  const TensorField* g1 = nullptr;      // grad(tr) field (stored or derived)
  double om = 1.0;
  double o2m = 1.0;
  double shift = 0.0;
  bool renormalized = true;
};

// Covariant derivatives of the eight propagated quantities on the slice;
// null means all-zero (used when extracting the evolution right-hand sides).
struct SliceDerivs {
  const TensorField* chi2 = nullptr;
  const TensorField* one = nullptr;
  const TensorField* bar2 = nullptr;
  const TensorField* g1 = nullptr;
  const SpectralField* mass = nullptr;
  const TensorField* b1 = nullptr;
  const SpectralField* scal = nullptr;
  const TensorField* bb1 = nullptr;
};

std::array<TensorField, kNumEq> assemble_slice(const GridPtr& grid,
                                               const ConformalFactor& u,
                                               const SliceFields& f, const SliceDerivs* d,
                                               bool evolution_only) {
  std::array<TensorField, kNumEq> res;
  const SpectralField one_c = constant_field(grid, 1.0);
  const SpectralField tr = tf_trace2(*f.chi2, u);
  const SpectralField trbar = tf_trace2(*f.bar2, u);
  const TensorField hat = tf_tracefree2(*f.chi2);
  const TensorField barhat = tf_tracefree2(*f.bar2);
  const TensorField grad_one = tf_gradient(*f.one, u);
  const SpectralField reS = re_part(*f.scal);
  const SpectralField imS = im_part(*f.scal);

  // --- evolution group -------------------------------------------------
  {
    TensorField r = tf_contract_pair(*f.chi2, 1, *f.chi2, 1, u);
    r = tf_add(r, *f.a2);
    if (d) r = tf_add(r, *d->chi2);
    res[0] = std::move(r);
  }
  {
    TensorField r = tf_scale(tf_contract_pair(*f.chi2, 1, *f.one, 0, u), 2.0);
    r = tf_add(r, *f.b1);
    if (d) r = tf_add(r, *d->one);
    res[1] = std::move(r);
  }
  {
    TensorField r = sym2(grad_one);
    r = tf_axpy(0.5, sym2(tf_contract_pair(*f.chi2, 1, *f.bar2, 1, u)), r);
    if (f.renormalized) r = tf_axpy(-f.o2m, *f.chi2, r);
    r = tf_axpy(-2.0 * f.om, tf_outer(*f.one, *f.one), r);
    r = tf_sub(r, tf_pure_trace2(reS, u));
    if (d) r = tf_add(r, *d->bar2);
    res[2] = std::move(r);
  }

  // --- derivative-evolution group --------------------------------------
  const TensorField grad_chi2 = tf_gradient(*f.chi2, u);
  {
    TensorField r = tf_contract_pair(*f.chi2, 1, *f.g1, 0, u);
    const TensorField step = tf_contract_pair(*f.chi2, 0, grad_chi2, 1, u);  // [d, a, e]
    r = tf_axpy(2.0, tf_contract(step, 0, 2, u), r);
    if (d) r = tf_add(r, *d->g1);
    res[7] = std::move(r);
  }
  {
    SpectralField r = 1.5 * multiply(tr, *f.mass + constant_field(grid, f.shift));
    r += (2.0 * f.om) * tf_contract_pair(*f.one, 0, *f.b1, 0, u).comp[0];
    r -= 2.0 * tf_contract(tf_contract_pair(hat, 0, grad_one, 0, u), 0, 1, u).comp[0];
    r += (2.0 * f.om) *
         tf_contract_pair(tf_contract_pair(hat, 0, *f.one, 0, u), 0, *f.one, 0, u).comp[0];
    r -= 2.0 * tf_contract_pair(*f.one, 0, *f.g1, 0, u).comp[0];
    const SpectralField zz = tf_contract_pair(*f.one, 0, *f.one, 0, u).comp[0];
    const SpectralField zz_coeff =
        f.renormalized ? (f.om * tr + 2.0 * one_c) : tr;
    r -= 1.5 * multiply(zz_coeff, zz);
    const SpectralField hh =
        tf_contract(tf_contract_pair(hat, 0, hat, 0, u), 0, 1, u).comp[0];
    const SpectralField hh_coeff =
        f.renormalized ? (trbar - (2.0 * f.o2m) * one_c) : trbar;
    r += 0.25 * multiply(hh_coeff, hh);
    if (d) r += *d->mass;
    res[8] = make_scalar(std::move(r));
  }

  if (evolution_only) {
    for (int e : {3, 4, 5, 6, 9, 10, 11}) res[e] = zero_tensor(grid, 0);
    return res;
  }

  // --- elliptic group ---------------------------------------------------
  {
    TensorField r = d2_oneform(hat, u);
    r = tf_axpy(f.om, *f.b1, r);
    r = tf_axpy(-1.0, *f.one, r);
    r = tf_axpy(-0.5, tf_gradient(make_scalar(tr), u), r);
    r = tf_axpy(-0.5 * f.om, tf_scale_field(*f.one, tr), r);
    res[3] = tf_axpy(f.om, tf_contract_pair(hat, 1, *f.one, 0, u), r);
  }
  {
    SpectralField r = d1_scalar(*f.one, u) + *f.scal + *f.mass;
    const TensorField t = tf_contract_pair(hat, 1, barhat, 1, u);
    r -= 0.5 * (tf_contract(t, 0, 1, u).comp[0] +
                cplx(0.0, 1.0) * tf_contract_eps(t, 0, 1, u).comp[0]);
    res[4] = make_scalar(std::move(r));
  }

  // --- Gauss-Codazzi group ----------------------------------------------
  {
    const TensorField t1 = tf_transpose(grad_chi2, 0, 1);  // grad_b X_{ac} as (a,b,c)
    TensorField t2 = tf_transpose(grad_chi2, 0, 1);        // grad_c X_{ab} as (a,b,c)
    t2 = tf_transpose(t2, 1, 2);
    TensorField r = tf_sub(t1, t2);
    const TensorField w = f.renormalized
                              ? tf_axpy(-1.0, *f.one, tf_scale(*f.b1, f.om))
                              : *f.b1;
    const TensorField gw = tf_outer(tf_pure_trace2(one_c, u), w);
    r = tf_add(r, gw);
    r = tf_axpy(-1.0, tf_transpose(gw, 1, 2), r);
    const TensorField xy = tf_outer(*f.chi2, *f.one);
    r = tf_axpy(-f.om, xy, r);
    res[5] = tf_axpy(f.om, tf_transpose(xy, 1, 2), r);
  }
  {
    const SpectralField K = metric_gauss_curvature(u, grid);
    const SpectralField pairing = pair2(*f.chi2, *f.bar2, u);
    SpectralField r = K;
    if (f.renormalized) {
      r -= one_c;
      r += f.om * reS;
      r -= (0.5 * f.om * f.o2m) * tr;
      r += 0.5 * trbar;
      r -= (0.5 * f.om) * (pairing - multiply(tr, trbar));
    } else {
      r += reS;
      r -= 0.5 * (pairing - multiply(tr, trbar));
    }
    res[6] = make_scalar(std::move(r));
  }

  // --- Bianchi group ------------------------------------------------------
  {
    TensorField r = tf_scale(d2_oneform(*f.a2, u), -1.0 / f.om);
    r = tf_axpy(2.0, tf_scale_field(*f.b1, tr), r);
    r = tf_axpy(-1.0, tf_contract_pair(*f.a2, 1, *f.one, 0, u), r);
    if (d) r = tf_add(r, *d->b1);
    res[9] = std::move(r);
  }
  {
    SpectralField r = cplx(-1.0, 0.0) * d1_scalar(*f.b1, u);
    r += 1.5 * multiply(tr, *f.scal - constant_field(grid, f.shift));
    TensorField t = tf_scale(tf_outer(*f.one, *f.b1), f.om);
    t = tf_axpy(0.5, tf_contract_pair(*f.bar2, 1, *f.a2, 1, u), t);
    r += tf_contract(t, 0, 1, u).comp[0] -
         cplx(0.0, 1.0) * tf_contract_eps(t, 0, 1, u).comp[0];
    if (d) r += *d->scal;
    res[10] = make_scalar(std::move(r));
  }
  {
    TensorField r = tf_scale(d1star_oneform(conj_field(*f.scal), grid), -1.0);
    r = tf_add(r, tf_scale_field(*f.bb1, tr));
    r = tf_axpy(-3.0 * f.om, tf_scale_field(*f.one, reS - constant_field(grid, f.shift)),
                r);
    r = tf_axpy(3.0 * f.om, tf_scale_field(rot_oneform(*f.one), imS), r);
    r = tf_axpy(-2.0 * f.om, tf_contract_pair(barhat, 1, *f.b1, 0, u), r);
    if (d) r = tf_add(r, *d->bb1);
    res[11] = std::move(r);
  }
  return res;
}

// Covariant s-derivative of a horizontal field in the physical picture:
// finite differences on the affine-radius positions plus the chi correction.
HorizontalField nabla_s_physical(const PhysicalConeData& phys,
                                 const std::vector<double>& s_pos,
                                 const HorizontalField& psi) {
  const auto st = derivative_stencils(s_pos, phys.tgrid.scheme_order());
  HorizontalField out;
  out.node.resize(psi.n_nodes());
  parallel_for(psi.n_nodes(), [&](std::size_t i) {
    TensorField acc = tf_scale(psi.node[st[i].first], st[i].w[0]);
    for (std::size_t j = 1; j < st[i].w.size(); ++j)
      acc = tf_axpy(st[i].w[j], psi.node[st[i].first + j], acc);
    if (psi.rank() > 0) {
      const ConformalFactor u(phys.metric_log[i]);
      acc = tf_add(acc, tf_k_correction(psi.node[i], phys.chi.node[i], u));
    }
    out.node[i] = std::move(acc);
  });
  return out;
}

ResidualReport make_report(const GridPtr& grid, const TimeGrid& tgrid,
                           const std::vector<std::array<TensorField, kNumEq>>& slices,
                           const std::vector<ConformalFactor>& factors,
                           const std::vector<double>& t_weight, double floor) {
  const int n = tgrid.n_nodes();
  ResidualReport report;
  report.entries.resize(kNumEq);
  for (int e = 0; e < kNumEq; ++e) {
    auto& entry = report.entries[e];
    entry.name = kEqNames[e];
    entry.group = kEqGroups[e];
    entry.floor = floor;
    entry.per_node.resize(n);
  }
  parallel_for(n, [&](std::size_t i) {
    for (int e = 0; e < kNumEq; ++e)
      report.entries[e].per_node[i] = tf_l2(slices[i][e], factors[i]);
  });
  for (int e = 0; e < kNumEq; ++e) {
    double acc = 0.0;
    const auto& pn = report.entries[e].per_node;
    for (int i = 0; i + 1 < n; ++i) {
      acc += 0.5 * (pn[i] * pn[i] * t_weight[i] + pn[i + 1] * pn[i + 1] * t_weight[i + 1]) *
             tgrid.dt();
    }
    report.entries[e].value = std::sqrt(acc);
    report.entries[e].pass = report.entries[e].value <= report.entries[e].floor;
  }
  return report;
}

}  // namespace

bool ResidualReport::all_pass() const {
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

double ResidualReport::max_value() const {
  double best = 0.0;
  for (const auto& e : entries) best = std::max(best, e.value);
  return best;
}

ResidualReport residuals_renormalized(const RenormalizedConeData& ren, double floor) {
  ren.validate();
  const FoliationContext ctx = ren.context();
  const int n = ren.n_nodes();

  const HorizontalField dH = nabla_t(ctx, ren.H);
  const HorizontalField dZ = nabla_t(ctx, ren.Z);
  const HorizontalField dHbar = nabla_t(ctx, ren.Hbar);
  const HorizontalField dG = nabla_t(ctx, ren.grad_trH);
  const HorizontalField dM = nabla_t(ctx, ren.M);
  const HorizontalField dB = nabla_t(ctx, ren.B);
  const HorizontalField dR = nabla_t(ctx, ren.R);
  const HorizontalField dBbar = nabla_t(ctx, ren.Bbar);

  std::vector<std::array<TensorField, kNumEq>> slices(n);
  parallel_for(n, [&](std::size_t i) {
    const double t = ren.tgrid.node(i);
    SliceFields f;
    f.chi2 = &ren.H.node[i];
    f.one = &ren.Z.node[i];
    f.bar2 = &ren.Hbar.node[i];
    f.a2 = &ren.A.node[i];
    f.b1 = &ren.B.node[i];
    f.bb1 = &ren.Bbar.node[i];
    f.scal = &ren.R.node[i].comp[0];
    f.mass = &ren.M.node[i].comp[0];
    f.g1 = &ren.grad_trH.node[i];
    f.om = 1.0 - t;
    f.o2m = ren.chart.one_minus_2m_over_s(t);
    f.shift = 2.0 * ren.chart.m / ren.chart.s0;
    f.renormalized = true;
    SliceDerivs d;
    d.chi2 = &dH.node[i];
    d.one = &dZ.node[i];
    d.bar2 = &dHbar.node[i];
    d.g1 = &dG.node[i];
    d.mass = &dM.node[i].comp[0];
    d.b1 = &dB.node[i];
    d.scal = &dR.node[i].comp[0];
    d.bb1 = &dBbar.node[i];
    slices[i] = assemble_slice(ren.grid, ctx.metric.at(i), f, &d, false);
  });

  std::vector<double> weight(n, 1.0);
  return make_report(ren.grid, ren.tgrid, slices, ctx.metric.factor, weight, floor);
}

ResidualReport residuals_physical(const PhysicalConeData& phys, double floor) {
  phys.validate();
  const int n = phys.n_nodes();
  std::vector<double> s_pos(n);
  for (int i = 0; i < n; ++i) s_pos[i] = phys.chart.s_of_t(phys.tgrid.node(i));

  // Complex scalar rho + i sigma and the derived gradient of the expansion.
  HorizontalField pscal = hf_zero(phys.grid, n, 0);
  HorizontalField gexp = hf_zero(phys.grid, n, 1);
  std::vector<ConformalFactor> factors;
  factors.reserve(n);
  for (int i = 0; i < n; ++i) factors.emplace_back(phys.metric_log[i]);
  parallel_for(n, [&](std::size_t i) {
    pscal.node[i].comp[0] =
        phys.rho.node[i].comp[0] + cplx(0.0, 1.0) * phys.sigma.node[i].comp[0];
    const SpectralField tr = tf_trace2(phys.chi.node[i], factors[i]);
    gexp.node[i] = tf_gradient(make_scalar(tr), factors[i]);
  });

  const HorizontalField dchi = nabla_s_physical(phys, s_pos, phys.chi);
  const HorizontalField dzeta = nabla_s_physical(phys, s_pos, phys.zeta);
  const HorizontalField dchibar = nabla_s_physical(phys, s_pos, phys.chibar);
  const HorizontalField dgexp = nabla_s_physical(phys, s_pos, gexp);
  const HorizontalField dmu = nabla_s_physical(phys, s_pos, phys.mu);
  const HorizontalField dbeta = nabla_s_physical(phys, s_pos, phys.beta);
  const HorizontalField dpscal = nabla_s_physical(phys, s_pos, pscal);
  const HorizontalField dbetabar = nabla_s_physical(phys, s_pos, phys.betabar);

  std::vector<std::array<TensorField, kNumEq>> slices(n);
  parallel_for(n, [&](std::size_t i) {
    SliceFields f;
    f.chi2 = &phys.chi.node[i];
    f.one = &phys.zeta.node[i];
    f.bar2 = &phys.chibar.node[i];
    f.a2 = &phys.alpha.node[i];
    f.b1 = &phys.beta.node[i];
    f.bb1 = &phys.betabar.node[i];
    f.scal = &pscal.node[i].comp[0];
    f.mass = &phys.mu.node[i].comp[0];
    f.g1 = &gexp.node[i];
    f.om = 1.0;
    f.o2m = 1.0;
    f.shift = 0.0;
    f.renormalized = false;
    SliceDerivs d;
    d.chi2 = &dchi.node[i];
    d.one = &dzeta.node[i];
    d.bar2 = &dchibar.node[i];
    d.g1 = &dgexp.node[i];
    d.mass = &dmu.node[i].comp[0];
    d.b1 = &dbeta.node[i];
    d.scal = &dpscal.node[i].comp[0];
    d.bb1 = &dbetabar.node[i];
    slices[i] = assemble_slice(phys.grid, factors[i], f, &d, false);
  });

  std::vector<double> weight(n);
  for (int i = 0; i < n; ++i) weight[i] = phys.chart.ds_dt(phys.tgrid.node(i));
  return make_report(phys.grid, phys.tgrid, slices, factors, weight, floor);
}

double physical_residual_factor(int eq, double s, double s0) {
  switch (eq) {
    case 0: return s * s / (s0 * s0);
    case 1: return s * s * s / (s0 * s0);
    case 2: return s / s0;
    case 3: return s * s / s0;
    case 4: return s * s * s / s0;
    case 5: return 1.0 / s0;
    case 6: return s * s;
    case 7: return s * s * s * s / (s0 * s0);
    case 8: return std::pow(s, 5) / (s0 * s0);
    case 9: return std::pow(s, 5) / (s0 * s0 * s0);
    case 10: return std::pow(s, 5) / (s0 * s0);
    case 11: return s * s * s / s0;
    default: throw ParameterError("physical_residual_factor: bad equation index");
  }
}

int residual_covariant_rank(int eq) {
  if (eq < 0 || eq >= kNumEq) throw ParameterError("residual_covariant_rank: bad index");
  return kEqRank[eq];
}

// ---------------------------------------------------------------------------
// Evolution
// ---------------------------------------------------------------------------

namespace {

struct EvolState {
  TensorField H, Z, Hbar, G;
  SpectralField M, u;
};

EvolState state_axpy(double c, const EvolState& d, const EvolState& y) {
  EvolState out;
  out.H = tf_axpy(c, d.H, y.H);
  out.Z = tf_axpy(c, d.Z, y.Z);
  out.Hbar = tf_axpy(c, d.Hbar, y.Hbar);
  out.G = tf_axpy(c, d.G, y.G);
  out.M = y.M + c * d.M;
  out.u = y.u + c * d.u;
  return out;
}

// Time derivative of the state: the evolution right-hand sides extracted from
// the residual assembler (with zero derivative slices), plus the conformal
// log tracking du/dt = tr H / 2.
EvolState state_rhs(const GridPtr& grid, const AffineChart& chart, double t,
                    const EvolState& y, const TensorField& A, const TensorField& B,
                    const SpectralField& R) {
  const ConformalFactor uf(y.u);
  SliceFields f;
  f.chi2 = &y.H;
  f.one = &y.Z;
  f.bar2 = &y.Hbar;
  f.a2 = &A;
  f.b1 = &B;
  f.bb1 = &y.Z;  // unused by the evolution equations
  f.scal = &R;
  f.mass = &y.M;
  f.g1 = &y.G;
  f.om = 1.0 - t;
  f.o2m = chart.one_minus_2m_over_s(t);
  f.shift = 2.0 * chart.m / chart.s0;
  f.renormalized = true;
  const auto res = assemble_slice(grid, uf, f, nullptr, /*evolution_only=*/true);

  EvolState d;
  // lie_t X = -k_correction(X) - res_ev(X); nabla_t X = -res_ev(X).
  d.H = tf_scale(tf_add(res[0], tf_k_correction(y.H, y.H, uf)), -1.0);
  d.Z = tf_scale(tf_add(res[1], tf_k_correction(y.Z, y.H, uf)), -1.0);
  d.Hbar = tf_scale(tf_add(res[2], tf_k_correction(y.Hbar, y.H, uf)), -1.0);
  d.G = tf_scale(tf_add(res[7], tf_k_correction(y.G, y.H, uf)), -1.0);
  d.M = cplx(-1.0, 0.0) * res[8].comp[0];
  d.u = 0.5 * tf_trace2(y.H, uf);
  return d;
}

}  // namespace

RenormalizedConeData evolve(const AffineChart& chart, const GridPtr& grid,
                            const TimeGrid& tgrid, const EvolveInputs& inputs,
                            double trh_ceiling) {
  const int n = tgrid.n_nodes();
  if (n < 4) throw DegenerateInputError("evolve: at least four nodes required");
  for (const HorizontalField* f : {&inputs.A, &inputs.B, &inputs.R, &inputs.Bbar})
    if (f->n_nodes() != n)
      throw IncompleteDataError("evolve: curvature inputs must cover the full grid");

  std::vector<EvolState> states(n);
  states[0].H = inputs.H0;
  states[0].Z = inputs.Z0;
  states[0].Hbar = inputs.Hbar0;
  states[0].G = inputs.G0;
  states[0].M = inputs.M0.comp.empty() ? constant_field(grid, 0.0) : inputs.M0.comp[0];
  states[0].u = inputs.u0.empty() ? SpectralField(grid, 0) : inputs.u0;

  const double dt = tgrid.dt();
  for (int i = 0; i + 1 < n; ++i) {
    const double t0 = tgrid.node(i);
    const double tm = t0 + 0.5 * dt;
    const double t1 = tgrid.node(i + 1);
    const TensorField A_m = interp_midpoint(inputs.A, i);
    const TensorField B_m = interp_midpoint(inputs.B, i);
    const TensorField R_m = interp_midpoint(inputs.R, i);

    const EvolState& y = states[i];
    const EvolState k1 = state_rhs(grid, chart, t0, y, inputs.A.node[i], inputs.B.node[i],
                                   inputs.R.node[i].comp[0]);
    const EvolState y2 = state_axpy(0.5 * dt, k1, y);
    const EvolState k2 = state_rhs(grid, chart, tm, y2, A_m, B_m, R_m.comp[0]);
    const EvolState y3 = state_axpy(0.5 * dt, k2, y);
    const EvolState k3 = state_rhs(grid, chart, tm, y3, A_m, B_m, R_m.comp[0]);
    const EvolState y4 = state_axpy(dt, k3, y);
    const EvolState k4 = state_rhs(grid, chart, t1, y4, inputs.A.node[i + 1],
                                   inputs.B.node[i + 1], inputs.R.node[i + 1].comp[0]);

    EvolState incr = state_axpy(1.0, k1, k4);
    incr = state_axpy(2.0, k2, incr);
    incr = state_axpy(2.0, k3, incr);
    states[i + 1] = state_axpy(dt / 6.0, incr, y);

    const ConformalFactor uf(states[i + 1].u);
    const SpectralField tr = tf_trace2(states[i + 1].H, uf);
    if (linf_norm(tr) > trh_ceiling)
      throw BlowupError("evolve: ||tr H||_inf exceeded the ceiling (conjugate-point warning)");
  }

  RenormalizedConeData out;
  out.chart = chart;
  out.grid = grid;
  out.tgrid = tgrid;
  out.metric_log.reserve(n);
  out.H = hf_zero(grid, n, 2);
  out.Z = hf_zero(grid, n, 1);
  out.Hbar = hf_zero(grid, n, 2);
  out.M = hf_zero(grid, n, 0);
  out.grad_trH = hf_zero(grid, n, 1);
  out.A = inputs.A;
  out.B = inputs.B;
  out.R = inputs.R;
  out.Bbar = inputs.Bbar;
  for (int i = 0; i < n; ++i) {
    out.metric_log.push_back(states[i].u);
    out.H.node[i] = states[i].H;
    out.Z.node[i] = states[i].Z;
    out.Hbar.node[i] = states[i].Hbar;
    out.M.node[i].comp[0] = states[i].M;
    out.grad_trH.node[i] = states[i].G;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gauss curvature and the canonical decomposition
// ---------------------------------------------------------------------------

KDecomposition gauss_curvature(const RenormalizedConeData& ren) {
  ren.validate();
  const FoliationContext ctx = ren.context();
  const int n = ren.n_nodes();
  KDecomposition out;
  out.K = hf_zero(ren.grid, n, 0);
  out.V = hf_zero(ren.grid, n, 1);
  out.W = hf_zero(ren.grid, n, 0);

  std::vector<double> identity(n, 0.0), gap_sq(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const double t = ren.tgrid.node(i);
    const double om = 1.0 - t;
    const double o2m = ren.chart.one_minus_2m_over_s(t);
    const ConformalFactor& u = ctx.metric.at(i);
    const SpectralField one_c = constant_field(ren.grid, 1.0);
    const SpectralField tr = tf_trace2(ren.H.node[i], u);
    const SpectralField trbar = tf_trace2(ren.Hbar.node[i], u);

    // K from the Gauss equation.
    SpectralField K = one_c;
    K -= om * re_part(ren.R.node[i].comp[0]);
    K += (0.5 * om * o2m) * tr;
    K -= 0.5 * trbar;
    const SpectralField pairing = pair2(ren.H.node[i], ren.Hbar.node[i], u);
    K += (0.5 * om) * (pairing - multiply(tr, trbar));
    out.K.node[i].comp[0] = K;

    // V = (1 - t) Z, W the remainder.
    out.V.node[i] = tf_scale(ren.Z.node[i], om);
    const SpectralField divV =
        tf_contract(tf_gradient(out.V.node[i], u), 0, 1, u).comp[0];
    const SpectralField W = K - one_c - divV;
    out.W.node[i].comp[0] = W;

    // Identity re-evaluated pointwise on the grid.
    const auto vk = K.values();
    const auto vd = divV.values();
    const auto vw = W.values();
    std::vector<cplx> diff(vk.size());
    for (std::size_t p = 0; p < vk.size(); ++p)
      diff[p] = vk[p] - 1.0 - vd[p] - vw[p];
    identity[i] = l2_norm(analyze(ren.grid, 0, diff));

    // Closed-form W through the elliptic relation:
    //   W = om (M + o2m tr/2 - tr trbar/4) - trbar/2,
    // whose gap to the remainder is om times the elliptic residual.
    SpectralField Wc = om * (ren.M.node[i].comp[0] + (0.5 * o2m) * tr -
                             0.25 * multiply(tr, trbar));
    Wc -= 0.5 * trbar;
    const double g = l2_norm(W - Wc);
    gap_sq[i] = g * g;
  });

  out.identity_residual = *std::max_element(identity.begin(), identity.end());
  double acc = 0.0;
  for (int i = 0; i + 1 < n; ++i)
    acc += 0.5 * (gap_sq[i] + gap_sq[i + 1]) * ren.tgrid.dt();
  out.closed_form_gap = std::sqrt(acc);

  LPProfile prof(ren.grid->lmax());
  out.v_norm_h_inf_half = besov_mixed_norm(ctx, out.V, prof, 2.0,
                                           std::numeric_limits<double>::infinity(), 0.5);
  out.w_norm_l_inf2 =
      mixed_norm(ctx, out.W, {MixedNormSpec::Order::TFirst,
                              std::numeric_limits<double>::infinity(), 2.0});
  return out;
}

// ---------------------------------------------------------------------------
// Budgets
// ---------------------------------------------------------------------------

FluxBudget budget_report(const RenormalizedConeData& ren) {
  ren.validate();
  const FoliationContext ctx = ren.context();
  const LPProfile prof(ren.grid->lmax());
  const double inf = std::numeric_limits<double>::infinity();
  const MixedNormSpec l22{MixedNormSpec::Order::TFirst, 2.0, 2.0};
  FluxBudget out;

  // Curvature flux.
  for (auto [name, field] : std::initializer_list<std::pair<const char*, const HorizontalField*>>{
           {"A_L22_tx", &ren.A}, {"B_L22_tx", &ren.B}, {"R_L22_tx", &ren.R},
           {"Bbar_L22_tx", &ren.Bbar}}) {
    const double v = mixed_norm(ctx, *field, l22);
    out.flux_terms.emplace_back(name, v);
    out.flux_gamma += v;
  }

  // Initial-data budget.
  {
    const ConformalFactor& u0 = ctx.metric.at(0);
    const SpectralField tr0 = tf_trace2(ren.H.node[0], u0);
    const double a = linf_norm(tr0);
    const double b = tensor_sobolev_x(ren.H.node[0], u0, 0.5);
    const double c = tensor_sobolev_x(ren.Z.node[0], u0, 0.5);
    const double d = tensor_besov_x(ren.Hbar.node[0], u0, prof, 1.0, 0.0);
    const double e = tensor_besov_x(ren.grad_trH.node[0], u0, prof, 1.0, 0.0);
    const double f = tensor_besov_x(ren.M.node[0], u0, prof, 1.0, 0.0);
    out.init_terms = {{"trH0_Linf", a},        {"H0_H_half", b}, {"Z0_H_half", c},
                      {"Hbar0_B0", d},         {"grad_trH0_B0", e},
                      {"M0_B0", f}};
    out.init_gamma = a + b + c + d + e + f;
  }

  // Output norms of the main estimate.
  {
    HorizontalField trH = hf_zero(ren.grid, ren.n_nodes(), 0);
    for (int i = 0; i < ren.n_nodes(); ++i)
      trH.node[i].comp[0] = tf_trace2(ren.H.node[i], ctx.metric.at(i));
    out.output_norms.emplace_back(
        "trH_Linfinf_tx", mixed_norm(ctx, trH, {MixedNormSpec::Order::TFirst, inf, inf}));

    auto triple = [&](const char* name, const HorizontalField& f) {
      const double v = n1_norm(ctx, f) +
                       mixed_norm(ctx, f, {MixedNormSpec::Order::XFirst, 2.0, inf}) +
                       besov_mixed_norm(ctx, f, prof, 2.0, inf, 0.5);
      out.output_norms.emplace_back(name, v);
    };
    triple("H_N1_Linf2xt_Hinfhalf", ren.H);
    triple("Z_N1_Linf2xt_Hinfhalf", ren.Z);

    out.output_norms.emplace_back(
        "nabla_t_grad_trH_L21_xt",
        mixed_norm(ctx, nabla_t(ctx, ren.grad_trH),
                   {MixedNormSpec::Order::XFirst, 1.0, 2.0}));
    out.output_norms.emplace_back(
        "nabla_t_M_L21_xt", mixed_norm(ctx, nabla_t(ctx, ren.M),
                                       {MixedNormSpec::Order::XFirst, 1.0, 2.0}));

    auto pairnorm = [&](const char* name, const HorizontalField& f) {
      const double v = mixed_norm(ctx, f, {MixedNormSpec::Order::XFirst, inf, 2.0}) +
                       besov_mixed_norm(ctx, f, prof, 1.0, inf, 0.0);
      out.output_norms.emplace_back(name, v);
    };
    pairnorm("grad_trH_L2infxt_Binf0", ren.grad_trH);
    pairnorm("M_L2infxt_Binf0", ren.M);
    pairnorm("Hbar_L2infxt_Binf0", ren.Hbar);

    auto gradient_field = [&](const HorizontalField& f) {
      HorizontalField g;
      g.node.resize(f.n_nodes());
      parallel_for(f.n_nodes(), [&](std::size_t i) {
        g.node[i] = tf_gradient(f.node[i], ctx.metric.at(i));
      });
      return g;
    };
    const HorizontalField zero2 = hf_zero(ren.grid, ren.n_nodes(), 3);
    out.output_norms.emplace_back(
        "grad_H_N0star_plus_B20",
        sum_norm_upper(ctx, gradient_field(ren.H), zero2, prof));
    const HorizontalField zero1 = hf_zero(ren.grid, ren.n_nodes(), 2);
    out.output_norms.emplace_back(
        "grad_Z_N0star_plus_B20",
        sum_norm_upper(ctx, gradient_field(ren.Z), zero1, prof));
    out.output_norms.emplace_back(
        "nabla_t_Hbar_N0star_plus_B20",
        sum_norm_upper(ctx, nabla_t(ctx, ren.Hbar), zero1, prof));
  }

  // K - 1 norms and the refined per-slice data.
  {
    const KDecomposition kd = gauss_curvature(ren);
    double sup = 0.0;
    out.refined_curvature.resize(ren.n_nodes());
    for (int i = 0; i < ren.n_nodes(); ++i) {
      const ConformalFactor& u = ctx.metric.at(i);
      SpectralField km1 = kd.K.node[i].comp[0] - constant_field(ren.grid, 1.0);
      const double h = tensor_sobolev_x(make_scalar(km1), u, -0.5);
      sup = std::max(sup, h);
      out.refined_curvature[i].t = ren.tgrid.node(i);
      out.refined_curvature[i].k_minus_one_h_minus_half = h;
      out.refined_curvature[i].tr_hbar_l2 =
          l2_norm(tf_trace2(ren.Hbar.node[i], u));
    }
    out.output_norms.emplace_back("K_minus_1_Hinf_minushalf_tx", sup);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Perturbed data generation
// ---------------------------------------------------------------------------

namespace {

// Band-limited field with a fixed modulus profile and seeded random phases;
// smooth in t through a low-order polynomial envelope.
SpectralField draw_component(const GridPtr& grid, int spin, int l_cut, double amp,
                             std::mt19937_64& rng, std::vector<std::array<double, 3>>* phases) {
  std::uniform_real_distribution<double> ph(0.0, 2.0 * 3.14159265358979323846);
  SpectralField f(grid, spin);
  int slot = 0;
  for (int l = std::max(1, std::abs(spin)); l <= std::min(l_cut, grid->lmax()); ++l) {
    const double scale = amp * std::pow(1.0 + l, -2.0);
    for (int m = -l; m <= l; ++m) {
      (void)slot;
      f.set_coeff(l, m, std::polar(scale, ph(rng)));
    }
  }
  (void)phases;
  return f;
}

SpectralField time_envelope(const GridPtr& grid, const SpectralField& base, double t,
                            double a1, double a2) {
  return (1.0 + a1 * t + a2 * t * t) * base;
}

}  // namespace

EvolveInputs perturbation_inputs(const AffineChart& chart, const GridPtr& grid,
                                 const TimeGrid& tgrid, const PerturbationRecipe& recipe) {
  (void)chart;
  std::mt19937_64 rng(recipe.seed);
  const int n = tgrid.n_nodes();
  const double eps = recipe.eps;
  std::uniform_real_distribution<double> envelope(-0.5, 0.5);

  EvolveInputs in;
  // Initial connection deviations.
  {
    SpectralField trace0 = re_part(draw_component(grid, 0, recipe.l_cut, eps, rng, nullptr));
    SpectralField hhat0 = draw_component(grid, 2, recipe.l_cut, eps, rng, nullptr);
    in.H0 = tf_add(make_sym2(hhat0, SpectralField(grid, 0)),
                   tf_pure_trace2(0.5 * trace0, ConformalFactor()));
    in.Z0 = make_oneform(draw_component(grid, 1, recipe.l_cut, eps, rng, nullptr));
    SpectralField trbar0 = re_part(draw_component(grid, 0, recipe.l_cut, eps, rng, nullptr));
    SpectralField hbarhat0 = draw_component(grid, 2, recipe.l_cut, eps, rng, nullptr);
    in.Hbar0 = tf_add(make_sym2(hbarhat0, SpectralField(grid, 0)),
                      tf_pure_trace2(0.5 * trbar0, ConformalFactor()));
    // grad(tr H)[0] derived from the trace for consistency.
    in.G0 = tf_gradient(make_scalar(tf_trace2(in.H0, ConformalFactor())), ConformalFactor());
    in.M0 = make_scalar(re_part(draw_component(grid, 0, recipe.l_cut, eps, rng, nullptr)));
    in.u0 = SpectralField(grid, 0);
  }
  // Curvature inputs, smooth in t.
  {
    const SpectralField a_base = draw_component(grid, 2, recipe.l_cut, eps, rng, nullptr);
    const SpectralField b_base = draw_component(grid, 1, recipe.l_cut, eps, rng, nullptr);
    const SpectralField r_base = draw_component(grid, 0, recipe.l_cut, eps, rng, nullptr);
    const SpectralField bb_base = draw_component(grid, 1, recipe.l_cut, eps, rng, nullptr);
    const double a1 = envelope(rng), a2 = envelope(rng);
    const double b1 = envelope(rng), b2 = envelope(rng);
    const double r1 = envelope(rng), r2 = envelope(rng);
    const double c1 = envelope(rng), c2 = envelope(rng);
    in.A = hf_zero(grid, n, 2);
    in.B = hf_zero(grid, n, 1);
    in.R = hf_zero(grid, n, 0);
    in.Bbar = hf_zero(grid, n, 1);
    for (int i = 0; i < n; ++i) {
      const double t = tgrid.node(i);
      in.A.node[i] = make_sym2(time_envelope(grid, a_base, t, a1, a2), SpectralField(grid, 0));
      in.B.node[i] = make_oneform(time_envelope(grid, b_base, t, b1, b2));
      in.R.node[i].comp[0] = time_envelope(grid, r_base, t, r1, r2);
      in.Bbar.node[i] = make_oneform(time_envelope(grid, bb_base, t, c1, c2));
    }
  }
  return in;
}

RenormalizedConeData perturbed_cone(const AffineChart& chart, const GridPtr& grid,
                                    const TimeGrid& tgrid, const PerturbationRecipe& recipe) {
  const EvolveInputs in = perturbation_inputs(chart, grid, tgrid, recipe);
  RenormalizedConeData ren = evolve(chart, grid, tgrid, in);
  if (!recipe.reconcile) return ren;

  // Reconcile: R through the Gauss equation with the metric curvature, M
  // through the elliptic relation, so the mass-aspect observables hold
  // exactly on the stored data.
  const FoliationContext ctx = ren.context();
  parallel_for(ren.n_nodes(), [&](std::size_t i) {
    const double t = ren.tgrid.node(i);
    const double om = 1.0 - t;
    const double o2m = ren.chart.one_minus_2m_over_s(t);
    const ConformalFactor& u = ctx.metric.at(i);
    const SpectralField one_c = constant_field(grid, 1.0);
    const SpectralField K = metric_gauss_curvature(u, grid);
    const SpectralField tr = tf_trace2(ren.H.node[i], u);
    const SpectralField trbar = tf_trace2(ren.Hbar.node[i], u);
    const SpectralField pairing = pair2(ren.H.node[i], ren.Hbar.node[i], u);

    SpectralField reR = (K - one_c) * cplx(-1.0, 0.0);
    reR += (0.5 * om * o2m) * tr;
    reR -= 0.5 * trbar;
    reR += (0.5 * om) * (pairing - multiply(tr, trbar));
    reR *= 1.0 / om;
    ren.R.node[i].comp[0] = reR + cplx(0.0, 1.0) * im_part(ren.R.node[i].comp[0]);

    // Elliptic relation: M = -Re(D1 Z) - Re R + <Hhat, Hbarhat>/2.
    const TensorField hat = tf_tracefree2(ren.H.node[i]);
    const TensorField barhat = tf_tracefree2(ren.Hbar.node[i]);
    const SpectralField divZ =
        tf_contract(tf_gradient(ren.Z.node[i], u), 0, 1, u).comp[0];
    const SpectralField hp =
        tf_contract(tf_contract_pair(hat, 1, barhat, 1, u), 0, 1, u).comp[0];
    ren.M.node[i].comp[0] = re_part(0.5 * hp - divZ - reR);
  });
  return ren;
}

}  // namespace nullcone
