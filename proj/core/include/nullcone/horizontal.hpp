#pragma once

#include "nullcone/tensor_field.hpp"
#include "nullcone/time_grid.hpp"

namespace nullcone {

// Family of tensor fields over the time grid, one TensorField per node.
struct HorizontalField {
  std::vector<TensorField> node;

  int n_nodes() const { return static_cast<int>(node.size()); }
  int rank() const { return node.empty() ? 0 : node.front().rank; }
  std::uint8_t contra_mask() const { return node.empty() ? 0 : node.front().contra_mask; }
  const GridPtr& grid() const { return node.front().grid(); }
  // Covariant minus contravariant rank, the conformal weight (l - r).
  int weight_l_minus_r() const;
};

HorizontalField hf_add(const HorizontalField& a, const HorizontalField& b);
HorizontalField hf_sub(const HorizontalField& a, const HorizontalField& b);
HorizontalField hf_scale(const HorizontalField& a, cplx c);
// Per-node scalar weights (chart powers of s, cutoff values, ...).
HorizontalField hf_scale_per_node(const HorizontalField& a, const std::vector<double>& w);
HorizontalField hf_zero(const GridPtr& grid, int n_nodes, int rank,
                        std::uint8_t contra_mask = 0);

// Conformally round horizontal metric: gamma[tau] = e^{2 u[tau]} x round.
// u may vary over the sphere (general field supported); most renormalized
// data keeps it constant per sphere.
struct HorizontalMetric {
  std::vector<ConformalFactor> factor;  // one per node; empty factor = round

  const ConformalFactor& at(int i) const { return factor[i]; }
  int n_nodes() const { return static_cast<int>(factor.size()); }
};

HorizontalMetric round_metric(int n_nodes);
// Metric from per-node conformal logs.
HorizontalMetric conformal_metric(const std::vector<SpectralField>& u);

// Second fundamental form of the foliation: k plus its trace/traceless parts
// with respect to the metric. The consistency k = trace/2 * gamma + traceless
// holds by construction.
struct SecondFundamentalForm {
  HorizontalField k;  // covariant rank 2, symmetric

  SpectralField trace(const HorizontalMetric& g, int i) const;
  TensorField traceless(int i) const;
};

// Everything the covariant t-calculus needs: grid, nodes, metric, and the
// second fundamental form driving the nabla_t correction.
struct FoliationContext {
  GridPtr grid;
  TimeGrid tgrid;
  HorizontalMetric metric;
  SecondFundamentalForm sff;

  int n_nodes() const { return tgrid.n_nodes(); }
  void validate() const;  // shape checks; throws ConfigError
};

// Context with metric gamma = e^{2u} x round, u given per node, and k derived
// from the exact conformal relation k = (du/dt) gamma (du/dt supplied).
FoliationContext conformal_context(const GridPtr& grid, const TimeGrid& tgrid,
                                   const std::vector<SpectralField>& u,
                                   const std::vector<SpectralField>& dudt);

// Data interpolation to the midpoint between nodes i and i+1 (4-point
// Lagrange; requires at least 4 nodes).
TensorField interp_midpoint(const HorizontalField& f, int i);
ConformalFactor interp_midpoint_factor(const HorizontalMetric& g, int i,
                                       const GridPtr& grid);

}  // namespace nullcone
