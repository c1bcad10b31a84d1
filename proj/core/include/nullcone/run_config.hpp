#pragma once

#include <cstdint>
#include <string>

namespace nullcone {

// Run parameters shared by the command-line drivers. Tolerances default to
// the exact-solution floors; all of them can be overridden from a JSON config
// or command-line flags (flags win).
struct RunConfig {
  int lmax = 16;
  int n_t = 181;
  double t_max = 0.9;
  double s0 = 4.0;
  double m = 1.0;
  std::uint64_t seed = 7;
  double eps = 1e-3;
  int l_cut = 6;

  double residual_floor = 1e-8;
  double trh_ceiling = 10.0;

  double dt() const { return t_max / (n_t - 1); }
  void validate() const;  // throws ParameterError / DomainError
};

// Merge values from a JSON object file into cfg (missing keys keep their
// values). Throws ConeFileError on parse failure.
void load_config(const std::string& path, RunConfig& cfg);

}  // namespace nullcone
