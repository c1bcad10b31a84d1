#pragma once

#include "nullcone/chart.hpp"
#include "nullcone/foliation.hpp"

namespace nullcone {

// Connection and curvature data of a geodesically foliated cone in the
// physical (induced-metric, affine-radius) picture. Fields live on the
// images of the uniform t-grid; the induced metric is conformally round,
// g-induced = e^{2 U(t)} x round. Exact and generated data keep U constant
// on each sphere.
struct PhysicalConeData {
  AffineChart chart;
  GridPtr grid;
  TimeGrid tgrid;
  std::vector<SpectralField> metric_log;  // U per node

  HorizontalField chi;      // (0,2) symmetric
  HorizontalField zeta;     // (0,1)
  HorizontalField chibar;   // (0,2) symmetric
  HorizontalField alpha;    // (0,2) symmetric traceless
  HorizontalField beta;     // (0,1)
  HorizontalField rho;      // scalar (real)
  HorizontalField sigma;    // scalar (real)
  HorizontalField betabar;  // (0,1)
  HorizontalField mu;       // scalar (real)

  int n_nodes() const { return tgrid.n_nodes(); }
  void validate() const;
};

// The renormalized picture on the finite cylinder: deviations from the
// Schwarzschild values of the chart, with gamma = s^{-2} g-induced.
struct RenormalizedConeData {
  AffineChart chart;
  GridPtr grid;
  TimeGrid tgrid;
  std::vector<SpectralField> metric_log;  // u = U - log s per node; 0 exactly for oracles

  HorizontalField H;         // (0,2) symmetric
  HorizontalField Z;         // (0,1)
  HorizontalField Hbar;      // (0,2) symmetric
  HorizontalField A;         // (0,2) symmetric traceless
  HorizontalField B;         // (0,1)
  HorizontalField R;         // complex scalar
  HorizontalField Bbar;      // (0,1)
  HorizontalField M;         // scalar (real)
  HorizontalField grad_trH;  // (0,1), carried as an independent field

  int n_nodes() const { return tgrid.n_nodes(); }
  void validate() const;
  // Foliation context with k = H, the second fundamental form of the
  // renormalized foliation.
  FoliationContext context() const;
};

// Exact Schwarzschild (m >= 0; m = 0 is Minkowski) cone data:
// chi = g/s, chibar = -(1 - 2m/s) g/s, zeta = 0, rho = -2m/s^3, mu = 2m/s^3,
// all other curvature zero, induced metric s^2 x round.
PhysicalConeData schwarzschild_exact(double m, double s0, const GridPtr& grid,
                                     const TimeGrid& tgrid);

// The renormalization maps (exact algebraic inverses of each other).
RenormalizedConeData renormalize(const PhysicalConeData& phys);
PhysicalConeData derenormalize(const RenormalizedConeData& ren);

// Mass aspect recomputed from its definition; `residual` is the L^{2,2}
// distance to the stored field over the renormalized cylinder measure.
struct MassAspectCheck {
  HorizontalField recomputed;
  double residual = 0.0;
};
MassAspectCheck mass_aspect(const PhysicalConeData& phys);

// Hawking mass of the level sphere at node i, both printed forms.
double hawking_mass(const PhysicalConeData& phys, int i);
double hawking_mass_expansion_form(const PhysicalConeData& phys, int i);

// r(v)/v per node via the Jacobian integral of the renormalized foliation.
std::vector<double> radius_ratio(const RenormalizedConeData& ren);

// Trace of chi with respect to the induced metric, per node.
SpectralField slashed_trace_chi(const PhysicalConeData& phys, int i);
// Physical foliation context: metric log U(t), k = chi.
FoliationContext physical_context(const PhysicalConeData& phys);

// Constant-on-sphere scalar as a spectral field.
SpectralField constant_field(const GridPtr& grid, cplx value);
// n copies of a constant scalar, for metric logs.
std::vector<SpectralField> constant_logs(const GridPtr& grid, const std::vector<double>& v);

}  // namespace nullcone
