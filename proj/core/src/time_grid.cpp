#include "nullcone/time_grid.hpp"

#include <algorithm>
#include <cmath>

#include "nullcone/errors.hpp"

namespace nullcone {

TimeGrid::TimeGrid(int n_nodes, double t_max, int scheme_order)
    : t_max_(t_max), scheme_order_(scheme_order) {
  if (n_nodes < 2) throw DegenerateInputError("TimeGrid: at least two nodes required");
  if (!(t_max > 0.0 && t_max < 1.0))
    throw ParameterError("TimeGrid: t_max must lie in (0, 1)");
  if (scheme_order != 2 && scheme_order != 4)
    throw ParameterError("TimeGrid: scheme order must be 2 or 4");
  nodes_.resize(n_nodes);
  dt_ = t_max / (n_nodes - 1);
  for (int i = 0; i < n_nodes; ++i) nodes_[i] = t_max * i / (n_nodes - 1);
}

int TimeGrid::index_of(double t) const {
  const int i = static_cast<int>(std::lround(t / dt_));
  if (i < 0 || i >= n_nodes() || std::abs(nodes_[i] - t) > 1e-12)
    throw ParameterError("TimeGrid: t is not a grid node");
  return i;
}

std::vector<double> fd_weights(const std::vector<double>& x, double x0, int deriv_order) {
  // Fornberg's recursive algorithm, specialized output at the requested order.
  const int n = static_cast<int>(x.size()) - 1;
  const int m = deriv_order;
  std::vector<std::vector<std::vector<double>>> d(
      n + 1, std::vector<std::vector<double>>(n + 1, std::vector<double>(m + 1, 0.0)));
  d[0][0][0] = 1.0;
  double c1 = 1.0;
  for (int i = 1; i <= n; ++i) {
    double c2 = 1.0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      for (int k = 0; k <= std::min(i, m); ++k) {
        d[i][j][k] =
            ((x[i] - x0) * d[i - 1][j][k] - (k > 0 ? k * d[i - 1][j][k - 1] : 0.0)) / c3;
      }
    }
    for (int k = 0; k <= std::min(i, m); ++k) {
      d[i][i][k] = c1 / c2 *
                   ((k > 0 ? k * d[i - 1][i - 1][k - 1] : 0.0) -
                    (x[i - 1] - x0) * d[i - 1][i - 1][k]);
    }
    c1 = c2;
  }
  std::vector<double> w(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) w[j] = d[n][j][m];
  return w;
}

std::vector<FdStencil> derivative_stencils(const std::vector<double>& positions, int order) {
  const int n = static_cast<int>(positions.size());
  const int pts = std::min(order + 1, n);
  std::vector<FdStencil> out(n);
  for (int i = 0; i < n; ++i) {
    int first = std::clamp(i - pts / 2, 0, n - pts);
    std::vector<double> x(positions.begin() + first, positions.begin() + first + pts);
    out[i].first = first;
    out[i].w = fd_weights(x, positions[i], 1);
  }
  return out;
}

namespace {

double exp_mollifier(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double basic_step(double x) {
  const double a = exp_mollifier(x);
  const double b = exp_mollifier(1.0 - x);
  return a / (a + b);
}

constexpr double kEdge = 0.2;
constexpr int kTablePanels = 4096;

// Plateau bump on [0, 1]: smoothed edges of width kEdge, identically 1 in the
// middle.
double plateau_bump(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return basic_step(x / kEdge) * basic_step((1.0 - x) / kEdge);
}

}  // namespace

CutoffPair::CutoffPair(double delta) : delta_(delta) {
  if (!(delta > 0.0)) throw ParameterError("CutoffPair: delta must be positive");
  // Cumulative Simpson table of the bump.
  step_table_.assign(kTablePanels + 1, 0.0);
  const double h = 1.0 / kTablePanels;
  for (int i = 1; i <= kTablePanels; ++i) {
    const double a = (i - 1) * h;
    const double b = i * h;
    step_table_[i] = step_table_[i - 1] +
                     h / 6.0 * (plateau_bump(a) + 4.0 * plateau_bump(0.5 * (a + b)) +
                                plateau_bump(b));
  }
  bump_integral_ = step_table_.back();
}

double CutoffPair::unit_step(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double pos = x * kTablePanels;
  const int i = std::min(static_cast<int>(pos), kTablePanels - 1);
  const double frac = pos - i;
  const double v = step_table_[i] * (1.0 - frac) + step_table_[i + 1] * frac;
  return v / bump_integral_;
}

double CutoffPair::eta_plus(double t) const {
  return unit_step((t / delta_ - 1.0 / 3.0) * 3.0);
}

double CutoffPair::deta_plus(double t) const {
  const double x = (t / delta_ - 1.0 / 3.0) * 3.0;
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return plateau_bump(x) / bump_integral_ * 3.0 / delta_;
}

MidpointStencil midpoint_stencil(int i, int n_nodes) {
  MidpointStencil st;
  st.first = std::clamp(i - 1, 0, std::max(0, n_nodes - 4));
  const double xm = i + 0.5;
  for (int j = 0; j < 4; ++j) {
    double w = 1.0;
    for (int k = 0; k < 4; ++k) {
      if (k == j) continue;
      w *= (xm - (st.first + k)) / static_cast<double>(j - k);
    }
    st.w[j] = w;
  }
  return st;
}

}  // namespace nullcone
