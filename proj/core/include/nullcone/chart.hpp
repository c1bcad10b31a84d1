#pragma once

#include <cmath>

#include "nullcone/errors.hpp"

namespace nullcone {

// Bookkeeping for the affine radius: s = s0/(1-t), t = 1 - s0/s, with the
// comparison mass m (s0 > 2m required). t in [0,1) corresponds to
// s in [s0, infinity).
struct AffineChart {
  double s0 = 1.0;
  double m = 0.0;

  AffineChart() = default;
  AffineChart(double s0_, double m_) : s0(s0_), m(m_) {
    if (!(s0 > 0.0)) throw DomainError("AffineChart: s0 must be positive");
    if (!(m >= 0.0)) throw DomainError("AffineChart: m must be nonnegative");
    if (!(s0 > 2.0 * m)) throw DomainError("AffineChart: s0 must exceed 2m");
  }

  double s_of_t(double t) const { return s0 / (1.0 - t); }
  double t_of_s(double s) const { return 1.0 - s0 / s; }
  double ds_dt(double t) const { return s0 / ((1.0 - t) * (1.0 - t)); }
  double one_minus_2m_over_s(double t) const { return 1.0 - 2.0 * m / s_of_t(t); }
};

}  // namespace nullcone
