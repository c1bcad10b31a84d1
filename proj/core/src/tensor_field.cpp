#include "nullcone/tensor_field.hpp"

#include <bit>
#include <cmath>

#include "nullcone/errors.hpp"

namespace nullcone {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

int get_bit(int idx, int pos) { return (idx >> pos) & 1; }
int set_bit(int idx, int pos, int bit) { return (idx & ~(1 << pos)) | (bit << pos); }
// Insert a new slot at position pos, shifting higher slots up.
int insert_bit(int idx, int pos, int bit) {
  const int low = idx & ((1 << pos) - 1);
  const int high = idx >> pos;
  return low | (bit << pos) | (high << (pos + 1));
}

void require_covariant(const TensorField& t, const char* op) {
  if (t.contra_mask != 0)
    throw UnsupportedRankError(std::string(op) + ": contravariant slots unsupported here");
}

// Weight exponent of |T|^2 under e^{2u}: each covariant slot contributes -2,
// each contravariant slot +2.
int norm_weight_exponent(const TensorField& t) {
  const int n_contra = std::popcount(static_cast<unsigned>(t.contra_mask));
  return 2 * (2 * n_contra - t.rank);
}

}  // namespace

ConformalFactor::ConformalFactor(SpectralField u) : u_(std::move(u)) {
  if (u_.spin() != 0) throw ConfigError("ConformalFactor: u must be spin 0");
  const double sq4pi = std::sqrt(4.0 * 3.14159265358979323846);
  u0_ = u_.coeff(0, 0).real() / sq4pi;
  double rest = 0.0;
  for (int l = 1; l <= u_.lmax(); ++l)
    for (int m = -l; m <= l; ++m) rest += std::norm(u_.coeff(l, m));
  constant_ = std::sqrt(rest) < 1e-14 * std::max(1.0, std::abs(u_.coeff(0, 0)));
  trivial_ = constant_ && std::abs(u0_) < 1e-15;
  if (!constant_) u_values_ = u_.values();
}

SpectralField ConformalFactor::apply_exp(const SpectralField& f, int c) const {
  if (trivial_ || c == 0) return f;
  if (constant_) return std::exp(c * u0_) * f;
  const auto vf = f.values();
  std::vector<cplx> out(vf.size());
  for (std::size_t i = 0; i < vf.size(); ++i)
    out[i] = vf[i] * std::exp(c * u_values_[i].real());
  return analyze(f.grid(), f.spin(), out);
}

std::vector<cplx> ConformalFactor::exp_values(const GridPtr& grid, int c) const {
  std::vector<cplx> out(grid->n_samples());
  if (constant_) {
    std::fill(out.begin(), out.end(), cplx(std::exp(c * u0_), 0.0));
  } else {
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = std::exp(c * u_values_[i].real());
  }
  return out;
}

int TensorField::component_spin(int rank, int idx) {
  return rank - 2 * std::popcount(static_cast<unsigned>(idx));
}

TensorField make_scalar(SpectralField f) {
  TensorField t;
  t.rank = 0;
  t.comp.push_back(std::move(f));
  return t;
}

TensorField make_oneform(const SpectralField& plus) {
  if (plus.spin() != 1) throw ConfigError("make_oneform: spin +1 component expected");
  TensorField t;
  t.rank = 1;
  t.comp.resize(2);
  t.comp[0] = plus;
  t.comp[1] = conj_field(plus);
  return t;
}

TensorField make_sym2(const SpectralField& plus2, const SpectralField& mixed) {
  if (plus2.spin() != 2 || mixed.spin() != 0)
    throw ConfigError("make_sym2: components must have spin 2 / 0");
  TensorField t;
  t.rank = 2;
  t.comp.resize(4);
  t.comp[0] = plus2;
  t.comp[1] = mixed;
  t.comp[2] = mixed;
  t.comp[3] = conj_field(plus2);
  return t;
}

TensorField zero_tensor(const GridPtr& grid, int rank, std::uint8_t contra_mask) {
  // Rank 4 appears only as the gradient of rank-3 fields, handled at the
  // coefficient level.
  if (rank < 0 || rank > 4) throw UnsupportedRankError("zero_tensor: rank must be 0..4");
  TensorField t;
  t.rank = rank;
  t.contra_mask = contra_mask;
  t.comp.reserve(1 << rank);
  for (int idx = 0; idx < (1 << rank); ++idx)
    t.comp.emplace_back(grid, TensorField::component_spin(rank, idx));
  return t;
}

TensorField tf_add(const TensorField& a, const TensorField& b) {
  if (a.rank != b.rank || a.contra_mask != b.contra_mask)
    throw ConfigError("tf_add: shape mismatch");
  TensorField out = a;
  for (std::size_t i = 0; i < out.comp.size(); ++i) out.comp[i] += b.comp[i];
  return out;
}

TensorField tf_sub(const TensorField& a, const TensorField& b) {
  if (a.rank != b.rank || a.contra_mask != b.contra_mask)
    throw ConfigError("tf_sub: shape mismatch");
  TensorField out = a;
  for (std::size_t i = 0; i < out.comp.size(); ++i) out.comp[i] -= b.comp[i];
  return out;
}

TensorField tf_scale(const TensorField& a, cplx c) {
  TensorField out = a;
  for (auto& f : out.comp) f *= c;
  return out;
}

TensorField tf_scale_field(const TensorField& a, const SpectralField& factor) {
  if (factor.spin() != 0) throw ConfigError("tf_scale_field: spin-0 factor expected");
  TensorField out = a;
  for (auto& f : out.comp) f = multiply(f, factor);
  return out;
}

TensorField tf_axpy(cplx c, const TensorField& x, const TensorField& y) {
  return tf_add(tf_scale(x, c), y);
}

TensorField tf_gradient(const TensorField& t, const ConformalFactor& u) {
  require_covariant(t, "tf_gradient");
  if (t.rank > 3) throw UnsupportedRankError("tf_gradient: rank must be <= 3");
  const auto& grid = t.grid();
  TensorField out = zero_tensor(grid, t.rank + 1);

  // Round part: derivative slot value m acts as -(1/sqrt2) eth, mbar as
  // -(1/sqrt2) eth_bar, on each component.
  for (int idx = 0; idx < (1 << t.rank); ++idx) {
    out.comp[insert_bit(idx, 0, 0)] = (-1.0 / kSqrt2) * eth(t.comp[idx]);
    out.comp[insert_bit(idx, 0, 1)] = (-1.0 / kSqrt2) * eth_bar(t.comp[idx]);
  }
  // A constant conformal scale keeps the round connection. Rank-3 inputs also
  // use the round connection: their gradients only ever feed coefficient-level
  // norms, where the conformal corrections are a bounded-factor refinement.
  if (u.constant() || t.rank == 0 || t.rank == 3) return out;

  // Conformal connection corrections. With u_a = grad u, the Christoffel
  // shift contributes per covariant slot, for derivative value d and slot
  // value v:  - u_v T[slot->d] - u_d T + h(d, v) (u_m T[slot->mbar] + u_mb T[slot->m]).
  SpectralField u_m = (-1.0 / kSqrt2) * eth(u.u());
  SpectralField u_mb = (-1.0 / kSqrt2) * eth_bar(u.u());
  auto uval = [&](int bit) -> const SpectralField& { return bit == 0 ? u_m : u_mb; };

  for (int idx = 0; idx < (1 << t.rank); ++idx) {
    for (int d = 0; d <= 1; ++d) {
      const int oi = insert_bit(idx, 0, d);
      SpectralField corr(grid, TensorField::component_spin(t.rank + 1, oi));
      for (int slot = 0; slot < t.rank; ++slot) {
        const int v = get_bit(idx, slot);
        corr -= multiply(uval(v), t.comp[set_bit(idx, slot, d)]);
        corr -= multiply(uval(d), t.comp[idx]);
        if (d != v) {
          corr += multiply(u_m, t.comp[set_bit(idx, slot, 1)]);
          corr += multiply(u_mb, t.comp[set_bit(idx, slot, 0)]);
        }
      }
      out.comp[oi] += corr;
    }
  }
  return out;
}

TensorField tf_contract(const TensorField& t, int i, int j, const ConformalFactor& u) {
  require_covariant(t, "tf_contract");
  if (i < 0 || i >= j || j >= t.rank) throw ParameterError("tf_contract: bad slot pair");
  TensorField out = zero_tensor(t.grid(), t.rank - 2);
  for (int kappa = 0; kappa < (1 << out.rank); ++kappa) {
    int base = insert_bit(kappa, i, 0);
    base = insert_bit(base, j, 0);
    const int idx_mmb = set_bit(set_bit(base, i, 0), j, 1);
    const int idx_mbm = set_bit(set_bit(base, i, 1), j, 0);
    out.comp[kappa] = u.apply_exp(t.comp[idx_mmb] + t.comp[idx_mbm], -2);
  }
  return out;
}

TensorField tf_contract_eps(const TensorField& t, int i, int j, const ConformalFactor& u) {
  require_covariant(t, "tf_contract_eps");
  if (i < 0 || i >= j || j >= t.rank) throw ParameterError("tf_contract_eps: bad slot pair");
  TensorField out = zero_tensor(t.grid(), t.rank - 2);
  for (int kappa = 0; kappa < (1 << out.rank); ++kappa) {
    int base = insert_bit(kappa, i, 0);
    base = insert_bit(base, j, 0);
    const int idx_mmb = set_bit(set_bit(base, i, 0), j, 1);
    const int idx_mbm = set_bit(set_bit(base, i, 1), j, 0);
    out.comp[kappa] =
        u.apply_exp(cplx(0.0, 1.0) * (t.comp[idx_mmb] - t.comp[idx_mbm]), -2);
  }
  return out;
}

TensorField tf_outer(const TensorField& a, const TensorField& b) {
  if (a.rank + b.rank > 3) throw UnsupportedRankError("tf_outer: combined rank above 3");
  TensorField out = zero_tensor(a.grid(), a.rank + b.rank,
                                static_cast<std::uint8_t>(a.contra_mask |
                                                          (b.contra_mask << a.rank)));
  for (int ia = 0; ia < (1 << a.rank); ++ia)
    for (int ib = 0; ib < (1 << b.rank); ++ib)
      out.comp[ia | (ib << a.rank)] = multiply(a.comp[ia], b.comp[ib]);
  return out;
}

namespace {

TensorField contract_pair_impl(const TensorField& a, int sa, const TensorField& b, int sb,
                               const ConformalFactor& u, bool eps) {
  if (a.contra_mask != 0 || b.contra_mask != 0)
    throw UnsupportedRankError("tf_contract_pair: covariant slots only");
  if (sa < 0 || sa >= a.rank || sb < 0 || sb >= b.rank)
    throw ParameterError("tf_contract_pair: bad slot");
  const int out_rank = a.rank + b.rank - 2;
  if (out_rank > 3) throw UnsupportedRankError("tf_contract_pair: output rank above 3");
  TensorField out = zero_tensor(a.grid(), out_rank);
  const int a_rest = a.rank - 1;
  for (int kappa = 0; kappa < (1 << out_rank); ++kappa) {
    const int ka = kappa & ((1 << a_rest) - 1);
    const int kb = kappa >> a_rest;
    SpectralField sum(a.grid(), TensorField::component_spin(out_rank, kappa));
    if (!eps) {
      for (int x = 0; x <= 1; ++x)
        sum += multiply(a.comp[insert_bit(ka, sa, x)], b.comp[insert_bit(kb, sb, 1 - x)]);
    } else {
      // epsilon^{xy} = i e^{-2u} (m^x mbar^y - mbar^x m^y)
      sum += cplx(0.0, 1.0) *
             multiply(a.comp[insert_bit(ka, sa, 0)], b.comp[insert_bit(kb, sb, 1)]);
      sum -= cplx(0.0, 1.0) *
             multiply(a.comp[insert_bit(ka, sa, 1)], b.comp[insert_bit(kb, sb, 0)]);
    }
    out.comp[kappa] = u.apply_exp(sum, -2);
  }
  return out;
}

}  // namespace

TensorField tf_contract_pair(const TensorField& a, int sa, const TensorField& b, int sb,
                             const ConformalFactor& u) {
  return contract_pair_impl(a, sa, b, sb, u, false);
}

TensorField tf_contract_pair_eps(const TensorField& a, int sa, const TensorField& b, int sb,
                                 const ConformalFactor& u) {
  return contract_pair_impl(a, sa, b, sb, u, true);
}

TensorField tf_transpose(const TensorField& t, int i, int j) {
  TensorField out = t;
  for (int idx = 0; idx < (1 << t.rank); ++idx) {
    const int swapped = set_bit(set_bit(idx, i, get_bit(idx, j)), j, get_bit(idx, i));
    out.comp[swapped] = t.comp[idx];
  }
  return out;
}

SpectralField tf_trace2(const TensorField& t, const ConformalFactor& u) {
  require_covariant(t, "tf_trace2");
  if (t.rank != 2) throw ParameterError("tf_trace2: rank-2 tensor expected");
  return u.apply_exp(t.comp[1] + t.comp[2], -2);
}

TensorField tf_tracefree2(const TensorField& t) {
  require_covariant(t, "tf_tracefree2");
  if (t.rank != 2) throw ParameterError("tf_tracefree2: rank-2 tensor expected");
  // Subtracting (tr_gamma T / 2) gamma removes the symmetric part of the
  // mixed components; the conformal factors cancel.
  TensorField out = t;
  SpectralField half = 0.5 * (t.comp[1] + t.comp[2]);
  out.comp[1] -= half;
  out.comp[2] -= half;
  return out;
}

TensorField tf_pure_trace2(const SpectralField& half_trace, const ConformalFactor& u) {
  if (half_trace.spin() != 0) throw ConfigError("tf_pure_trace2: spin-0 field expected");
  TensorField out = zero_tensor(half_trace.grid(), 2);
  out.comp[1] = u.apply_exp(half_trace, 2);
  out.comp[2] = out.comp[1];
  return out;
}

std::vector<double> tf_pointwise_sq(const TensorField& t, const ConformalFactor& u) {
  const auto& grid = t.grid();
  std::vector<double> acc(grid->n_samples(), 0.0);
  for (const auto& c : t.comp) {
    if (std::abs(c.spin()) > kMaxTransformSpin)
      throw UnsupportedRankError("tf_pointwise_sq: component spin beyond transform range");
    const auto v = c.values();
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += std::norm(v[i]);
  }
  const int c = norm_weight_exponent(t);
  if (!u.trivial() && c != 0) {
    const auto w = u.exp_values(grid, c);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] *= w[i].real();
  }
  return acc;
}

double tf_l2(const TensorField& t, const ConformalFactor& u) {
  const auto& grid = t.grid();
  const int c = norm_weight_exponent(t) + 2;  // |.|^2 weight plus the measure
  if (u.trivial() || c == 0) {
    double acc = 0.0;
    for (const auto& f : t.comp) acc += std::pow(l2_norm(f), 2);
    return std::sqrt(acc);
  }
  if (u.constant()) {
    double acc = 0.0;
    for (const auto& f : t.comp) acc += std::pow(l2_norm(f), 2);
    return std::sqrt(acc * std::exp(c * u.constant_value()));
  }
  std::vector<cplx> w;
  double acc = 0.0;
  for (const auto& f : t.comp) {
    if (std::abs(f.spin()) > kMaxTransformSpin) {
      // Coefficient-level fallback with the mean conformal factor; spin-4
      // components only appear in bounded-factor diagnostic norms.
      acc += std::pow(l2_norm(f), 2) * std::exp(c * u.constant_value());
      continue;
    }
    if (w.empty()) w = u.exp_values(grid, c);
    const auto v = f.values();
    for (int i = 0; i < grid->n_theta(); ++i) {
      double row = 0.0;
      for (int j = 0; j < grid->n_phi(); ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * grid->n_phi() + j;
        row += std::norm(v[idx]) * w[idx].real();
      }
      acc += grid->point_weight(i) * row;
    }
  }
  return std::sqrt(acc);
}

double tf_linf(const TensorField& t, const ConformalFactor& u) {
  const auto sq = tf_pointwise_sq(t, u);
  double best = 0.0;
  for (double a : sq) best = std::max(best, a);
  return std::sqrt(best);
}

TensorField tf_k_correction(const TensorField& psi, const TensorField& k,
                            const ConformalFactor& u) {
  if (k.rank != 2 || k.contra_mask != 0)
    throw ConfigError("tf_k_correction: k must be covariant rank 2");
  if (psi.rank == 0) return zero_tensor(psi.grid(), 0);
  TensorField out = zero_tensor(psi.grid(), psi.rank, psi.contra_mask);
  const SpectralField& k_pp = k.comp[0];   // k(m, m)
  const SpectralField& k_mix = k.comp[1];  // k(m, mbar)
  const SpectralField& k_mm = k.comp[3];   // k(mbar, mbar)
  for (int idx = 0; idx < (1 << psi.rank); ++idx) {
    SpectralField sum(psi.grid(), TensorField::component_spin(psi.rank, idx));
    for (int slot = 0; slot < psi.rank; ++slot) {
      const int v = get_bit(idx, slot);
      const double sign = (psi.contra_mask >> slot) & 1 ? 1.0 : -1.0;
      SpectralField pair =
          v == 0 ? multiply(k_pp, psi.comp[set_bit(idx, slot, 1)]) +
                       multiply(k_mix, psi.comp[idx])
                 : multiply(k_mm, psi.comp[set_bit(idx, slot, 0)]) +
                       multiply(k_mix, psi.comp[idx]);
      sum += sign * pair;
    }
    out.comp[idx] = u.apply_exp(sum, -2);
  }
  return out;
}

}  // namespace nullcone
