#pragma once

#include <optional>
#include <string>

#include "nullcone/cone_data.hpp"
#include "nullcone/structure.hpp"

namespace nullcone {

// Malformed or truncated cone files.
class ConeFileError : public std::runtime_error {
 public:
  explicit ConeFileError(const std::string& what) : std::runtime_error(what) {}
};

// nullcone/1 container: a JSON manifest (grid, chart, field table) next to a
// raw binary block file. Coefficients are serialized little-endian as
// (re, im) float64 pairs in l-major order with m running from -l to l, one
// block per stored component per node; conjugate components of real tensors
// are reconstructed on load.
void write_cone(const std::string& json_path, const PhysicalConeData& data);
void write_cone(const std::string& json_path, const RenormalizedConeData& data);

struct LoadedCone {
  std::optional<PhysicalConeData> phys;
  std::optional<RenormalizedConeData> ren;
  bool is_physical() const { return phys.has_value(); }
};
LoadedCone read_cone(const std::string& json_path);

// Report serialization (one row per equation/norm).
std::string residual_report_json(const ResidualReport& report);
std::string residual_report_csv(const ResidualReport& report);
std::string budget_json(const FluxBudget& budget);
std::string budget_csv(const FluxBudget& budget);

}  // namespace nullcone
