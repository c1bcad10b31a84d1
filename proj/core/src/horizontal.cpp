#include "nullcone/horizontal.hpp"

#include <bit>

#include "nullcone/errors.hpp"

namespace nullcone {

int HorizontalField::weight_l_minus_r() const {
  const int r = std::popcount(static_cast<unsigned>(contra_mask()));
  return (rank() - r) - r;
}

HorizontalField hf_add(const HorizontalField& a, const HorizontalField& b) {
  if (a.n_nodes() != b.n_nodes()) throw ConfigError("hf_add: node count mismatch");
  HorizontalField out;
  out.node.reserve(a.n_nodes());
  for (int i = 0; i < a.n_nodes(); ++i) out.node.push_back(tf_add(a.node[i], b.node[i]));
  return out;
}

HorizontalField hf_sub(const HorizontalField& a, const HorizontalField& b) {
  if (a.n_nodes() != b.n_nodes()) throw ConfigError("hf_sub: node count mismatch");
  HorizontalField out;
  out.node.reserve(a.n_nodes());
  for (int i = 0; i < a.n_nodes(); ++i) out.node.push_back(tf_sub(a.node[i], b.node[i]));
  return out;
}

HorizontalField hf_scale(const HorizontalField& a, cplx c) {
  HorizontalField out;
  out.node.reserve(a.n_nodes());
  for (const auto& t : a.node) out.node.push_back(tf_scale(t, c));
  return out;
}

HorizontalField hf_scale_per_node(const HorizontalField& a, const std::vector<double>& w) {
  if (static_cast<int>(w.size()) != a.n_nodes())
    throw ConfigError("hf_scale_per_node: weight count mismatch");
  HorizontalField out;
  out.node.reserve(a.n_nodes());
  for (int i = 0; i < a.n_nodes(); ++i) out.node.push_back(tf_scale(a.node[i], w[i]));
  return out;
}

HorizontalField hf_zero(const GridPtr& grid, int n_nodes, int rank,
                        std::uint8_t contra_mask) {
  HorizontalField out;
  out.node.reserve(n_nodes);
  for (int i = 0; i < n_nodes; ++i) out.node.push_back(zero_tensor(grid, rank, contra_mask));
  return out;
}

HorizontalMetric round_metric(int n_nodes) {
  HorizontalMetric g;
  g.factor.assign(n_nodes, ConformalFactor());
  return g;
}

HorizontalMetric conformal_metric(const std::vector<SpectralField>& u) {
  HorizontalMetric g;
  g.factor.reserve(u.size());
  for (const auto& f : u) g.factor.emplace_back(f);
  return g;
}

SpectralField SecondFundamentalForm::trace(const HorizontalMetric& g, int i) const {
  return tf_trace2(k.node[i], g.at(i));
}

TensorField SecondFundamentalForm::traceless(int i) const {
  return tf_tracefree2(k.node[i]);
}

void FoliationContext::validate() const {
  if (!grid) throw ConfigError("FoliationContext: missing grid");
  if (metric.n_nodes() != tgrid.n_nodes())
    throw ConfigError("FoliationContext: metric nodes do not match the time grid");
  if (sff.k.n_nodes() != 0 && sff.k.n_nodes() != tgrid.n_nodes())
    throw ConfigError("FoliationContext: sff nodes do not match the time grid");
}

FoliationContext conformal_context(const GridPtr& grid, const TimeGrid& tgrid,
                                   const std::vector<SpectralField>& u,
                                   const std::vector<SpectralField>& dudt) {
  if (static_cast<int>(u.size()) != tgrid.n_nodes() || u.size() != dudt.size())
    throw ConfigError("conformal_context: node count mismatch");
  FoliationContext ctx;
  ctx.grid = grid;
  ctx.tgrid = tgrid;
  ctx.metric = conformal_metric(u);
  // k = (du/dt) gamma: pure trace with gamma-trace 2 du/dt.
  ctx.sff.k.node.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    ctx.sff.k.node.push_back(tf_pure_trace2(dudt[i], ctx.metric.at(i)));
  return ctx;
}

TensorField interp_midpoint(const HorizontalField& f, int i) {
  if (f.n_nodes() < 4)
    throw DegenerateInputError("interp_midpoint: at least four nodes required");
  const auto st = midpoint_stencil(i, f.n_nodes());
  TensorField out = tf_scale(f.node[st.first], st.w[0]);
  for (int j = 1; j < 4; ++j)
    out = tf_axpy(st.w[j], f.node[st.first + j], out);
  return out;
}

ConformalFactor interp_midpoint_factor(const HorizontalMetric& g, int i,
                                       const GridPtr& grid) {
  if (g.n_nodes() < 4)
    throw DegenerateInputError("interp_midpoint_factor: at least four nodes required");
  bool all_trivial = true;
  for (const auto& f : g.factor) all_trivial = all_trivial && f.trivial();
  if (all_trivial) return ConformalFactor();
  const auto st = midpoint_stencil(i, g.n_nodes());
  SpectralField u(grid, 0);
  for (int j = 0; j < 4; ++j) {
    const auto& fj = g.factor[st.first + j];
    if (fj.has_grid()) {
      u += st.w[j] * fj.u();
    } else if (fj.constant() && fj.constant_value() != 0.0) {
      SpectralField c(grid, 0);
      c.set_coeff(0, 0, fj.constant_value() * std::sqrt(4.0 * 3.14159265358979323846));
      u += st.w[j] * c;
    }
  }
  return ConformalFactor(std::move(u));
}

}  // namespace nullcone
