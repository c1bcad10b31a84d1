#pragma once

#include <vector>

namespace nullcone {

// Uniform grid on [0, t_max], t_max < 1 strictly (t = 1 is the infinity
// boundary, reached only as a limit).
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(int n_nodes, double t_max, int scheme_order = 4);

  int n_nodes() const { return static_cast<int>(nodes_.size()); }
  double t_max() const { return t_max_; }
  double dt() const { return dt_; }
  int scheme_order() const { return scheme_order_; }
  double node(int i) const { return nodes_[i]; }
  const std::vector<double>& nodes() const { return nodes_; }
  // Throws ParameterError when t is not a grid node (within 1e-12).
  int index_of(double t) const;

 private:
  std::vector<double> nodes_;
  double t_max_ = 0.0;
  double dt_ = 0.0;
  int scheme_order_ = 4;
};

// Fornberg weights: given distinct sample points x[] and an evaluation point
// x0, returns w such that sum w_j f(x_j) approximates d^m f / dx^m at x0 to
// the order allowed by the stencil size.
std::vector<double> fd_weights(const std::vector<double>& x, double x0, int deriv_order);

// First-derivative stencils of the given order on arbitrary node positions:
// weights[i] holds the (stencil, offset) pair for node i.
struct FdStencil {
  int first = 0;  // first node of the stencil
  std::vector<double> w;
};
std::vector<FdStencil> derivative_stencils(const std::vector<double>& positions, int order);

// Smooth cutoff pair on [0, delta]: eta_plus = 0 on [0, delta/3], 1 on
// [2 delta/3, delta], eta_minus = 1 - eta_plus, with |eta'| <= 4/delta. Built
// from the exp(-1/x) mollifier: the unit step is the normalized integral of a
// plateau bump with smoothed edges (edge width 1/5), which keeps the maximal
// slope at 3.75/delta after rescaling the transition to width delta/3.
class CutoffPair {
 public:
  explicit CutoffPair(double delta);
  double delta() const { return delta_; }
  double eta_plus(double t) const;
  double eta_minus(double t) const { return 1.0 - eta_plus(t); }
  double deta_plus(double t) const;  // closed form through the bump
  double deta_minus(double t) const { return -deta_plus(t); }

 private:
  double unit_step(double x) const;  // integral-normalized smooth step on [0,1]
  double delta_ = 1.0;
  double bump_integral_ = 1.0;
  std::vector<double> step_table_;  // cumulative integral of the bump
};

// Value at the midpoint between nodes i and i+1 by 4-point Lagrange
// interpolation on a uniform grid (one-sided near the ends).
struct MidpointStencil {
  int first = 0;
  double w[4];
};
MidpointStencil midpoint_stencil(int i, int n_nodes);

}  // namespace nullcone
