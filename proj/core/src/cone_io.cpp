#include "nullcone/cone_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nullcone {

namespace {

using ordered_json = nlohmann::ordered_json;

// Storage schema per field kind: which components are written; the rest are
// reconstructed by conjugation/symmetry.
enum class FieldKind { Scalar, OneForm, Sym2, Sym2Tracefree };

struct FieldSpec {
  const char* name;
  FieldKind kind;
};

constexpr FieldSpec kPhysicalFields[] = {
    {"metric_log", FieldKind::Scalar}, {"chi", FieldKind::Sym2},
    {"zeta", FieldKind::OneForm},      {"chibar", FieldKind::Sym2},
    {"alpha", FieldKind::Sym2Tracefree}, {"beta", FieldKind::OneForm},
    {"rho", FieldKind::Scalar},        {"sigma", FieldKind::Scalar},
    {"betabar", FieldKind::OneForm},   {"mu", FieldKind::Scalar}};

constexpr FieldSpec kRenormalizedFields[] = {
    {"metric_log", FieldKind::Scalar}, {"H", FieldKind::Sym2},
    {"Z", FieldKind::OneForm},         {"Hbar", FieldKind::Sym2},
    {"A", FieldKind::Sym2Tracefree},   {"B", FieldKind::OneForm},
    {"R", FieldKind::Scalar},          {"Bbar", FieldKind::OneForm},
    {"M", FieldKind::Scalar},          {"grad_trH", FieldKind::OneForm}};

int stored_components(FieldKind k) {
  switch (k) {
    case FieldKind::Scalar: return 1;
    case FieldKind::OneForm: return 1;
    case FieldKind::Sym2: return 2;
    case FieldKind::Sym2Tracefree: return 1;
  }
  return 0;
}

const char* kind_tag(FieldKind k) {
  switch (k) {
    case FieldKind::Scalar: return "scalar";
    case FieldKind::OneForm: return "oneform";
    case FieldKind::Sym2: return "sym2";
    case FieldKind::Sym2Tracefree: return "sym2_tracefree";
  }
  return "";
}

FieldKind kind_from_tag(const std::string& tag) {
  if (tag == "scalar") return FieldKind::Scalar;
  if (tag == "oneform") return FieldKind::OneForm;
  if (tag == "sym2") return FieldKind::Sym2;
  if (tag == "sym2_tracefree") return FieldKind::Sym2Tracefree;
  throw ConeFileError("unknown field kind: " + tag);
}

void append_field(std::ostream& os, const SpectralField& f) {
  // Little-endian float64 pairs; assumes a little-endian host.
  os.write(reinterpret_cast<const char*>(f.coeffs().data()),
           static_cast<std::streamsize>(f.coeffs().size() * sizeof(cplx)));
}

void write_blocks(std::ostream& os, FieldKind kind, const TensorField& t) {
  switch (kind) {
    case FieldKind::Scalar:
      append_field(os, t.comp[0]);
      break;
    case FieldKind::OneForm:
      append_field(os, t.comp[0]);
      break;
    case FieldKind::Sym2:
      append_field(os, t.comp[0]);
      append_field(os, t.comp[1]);
      break;
    case FieldKind::Sym2Tracefree:
      append_field(os, t.comp[0]);
      break;
  }
}

SpectralField read_field(std::istream& is, const GridPtr& grid, int spin) {
  std::vector<cplx> coeffs(grid->n_coeff());
  is.read(reinterpret_cast<char*>(coeffs.data()),
          static_cast<std::streamsize>(coeffs.size() * sizeof(cplx)));
  if (!is) throw ConeFileError("truncated coefficient block");
  return SpectralField(grid, spin, std::move(coeffs));
}

TensorField read_blocks(std::istream& is, const GridPtr& grid, FieldKind kind) {
  switch (kind) {
    case FieldKind::Scalar:
      return make_scalar(read_field(is, grid, 0));
    case FieldKind::OneForm:
      return make_oneform(read_field(is, grid, 1));
    case FieldKind::Sym2: {
      const SpectralField plus = read_field(is, grid, 2);
      const SpectralField mixed = read_field(is, grid, 0);
      return make_sym2(plus, mixed);
    }
    case FieldKind::Sym2Tracefree:
      return make_sym2(read_field(is, grid, 2), SpectralField(grid, 0));
  }
  throw ConeFileError("unreachable field kind");
}

ordered_json manifest_for(const AffineChart& chart, const GridPtr& grid,
                          const TimeGrid& tgrid, const char* kind,
                          const std::string& bin_name,
                          const FieldSpec* specs, std::size_t n_specs) {
  ordered_json j;
  j["format"] = "nullcone/1";
  j["kind"] = kind;
  j["s0"] = chart.s0;
  j["m"] = chart.m;
  j["lmax"] = grid->lmax();
  j["n_theta"] = grid->n_theta();
  j["n_phi"] = grid->n_phi();
  j["n_t"] = tgrid.n_nodes();
  j["t_max"] = tgrid.t_max();
  j["scheme_order"] = tgrid.scheme_order();
  j["data"] = bin_name;
  ordered_json fields = ordered_json::array();
  for (std::size_t i = 0; i < n_specs; ++i) {
    ordered_json f;
    f["name"] = specs[i].name;
    f["kind"] = kind_tag(specs[i].kind);
    f["components"] = stored_components(specs[i].kind);
    fields.push_back(f);
  }
  j["fields"] = fields;
  return j;
}

std::string bin_path_for(const std::string& json_path) {
  std::filesystem::path p(json_path);
  p.replace_extension(".bin");
  return p.string();
}

template <typename DataT>
void write_cone_impl(const std::string& json_path, const DataT& data, const char* kind,
                     const FieldSpec* specs, std::size_t n_specs,
                     const std::vector<const HorizontalField*>& fields) {
  data.validate();
  const std::string bin_path = bin_path_for(json_path);
  const ordered_json manifest =
      manifest_for(data.chart, data.grid, data.tgrid, kind,
                   std::filesystem::path(bin_path).filename().string(), specs, n_specs);
  {
    std::ofstream os(json_path);
    if (!os) throw ConeFileError("cannot open " + json_path);
    os << manifest.dump(2) << "\n";
  }
  std::ofstream os(bin_path, std::ios::binary);
  if (!os) throw ConeFileError("cannot open " + bin_path);
  // metric_log first (spec index 0), then the field table order.
  for (int i = 0; i < data.n_nodes(); ++i) append_field(os, data.metric_log[i]);
  for (std::size_t fi = 0; fi < fields.size(); ++fi) {
    for (int i = 0; i < data.n_nodes(); ++i)
      write_blocks(os, specs[fi + 1].kind, fields[fi]->node[i]);
  }
}

}  // namespace

void write_cone(const std::string& json_path, const PhysicalConeData& data) {
  write_cone_impl(json_path, data, "physical", kPhysicalFields,
                  std::size(kPhysicalFields),
                  {&data.chi, &data.zeta, &data.chibar, &data.alpha, &data.beta,
                   &data.rho, &data.sigma, &data.betabar, &data.mu});
}

void write_cone(const std::string& json_path, const RenormalizedConeData& data) {
  write_cone_impl(json_path, data, "renormalized", kRenormalizedFields,
                  std::size(kRenormalizedFields),
                  {&data.H, &data.Z, &data.Hbar, &data.A, &data.B, &data.R,
                   &data.Bbar, &data.M, &data.grad_trH});
}

LoadedCone read_cone(const std::string& json_path) {
  ordered_json manifest;
  {
    std::ifstream is(json_path);
    if (!is) throw ConeFileError("cannot open " + json_path);
    try {
      is >> manifest;
    } catch (const std::exception& e) {
      throw ConeFileError(std::string("manifest parse failure: ") + e.what());
    }
  }
  try {
    if (manifest.at("format").get<std::string>() != "nullcone/1")
      throw ConeFileError("unsupported format tag");
    const std::string kind = manifest.at("kind").get<std::string>();
    const AffineChart chart(manifest.at("s0").get<double>(), manifest.at("m").get<double>());
    const GridPtr grid =
        SphereGrid::make(manifest.at("lmax").get<int>(), manifest.at("n_theta").get<int>(),
                         manifest.at("n_phi").get<int>());
    const TimeGrid tgrid(manifest.at("n_t").get<int>(), manifest.at("t_max").get<double>(),
                         manifest.at("scheme_order").get<int>());
    const std::filesystem::path bin_path =
        std::filesystem::path(json_path).parent_path() /
        manifest.at("data").get<std::string>();
    std::ifstream is(bin_path, std::ios::binary);
    if (!is) throw ConeFileError("cannot open " + bin_path.string());

    const auto& fields = manifest.at("fields");
    auto expect_field = [&](std::size_t idx, const FieldSpec& spec) {
      if (idx >= fields.size()) throw ConeFileError("manifest field table too short");
      if (fields[idx].at("name").get<std::string>() != spec.name ||
          kind_from_tag(fields[idx].at("kind").get<std::string>()) != spec.kind)
        throw ConeFileError("manifest field table mismatch");
    };

    LoadedCone out;
    const int n = tgrid.n_nodes();
    auto read_metric = [&]() {
      std::vector<SpectralField> logs;
      logs.reserve(n);
      for (int i = 0; i < n; ++i) logs.push_back(read_field(is, grid, 0));
      return logs;
    };
    auto read_horizontal = [&](FieldKind kind2) {
      HorizontalField f;
      f.node.reserve(n);
      for (int i = 0; i < n; ++i) f.node.push_back(read_blocks(is, grid, kind2));
      return f;
    };

    if (kind == "physical") {
      for (std::size_t i = 0; i < std::size(kPhysicalFields); ++i)
        expect_field(i, kPhysicalFields[i]);
      PhysicalConeData d;
      d.chart = chart;
      d.grid = grid;
      d.tgrid = tgrid;
      d.metric_log = read_metric();
      d.chi = read_horizontal(FieldKind::Sym2);
      d.zeta = read_horizontal(FieldKind::OneForm);
      d.chibar = read_horizontal(FieldKind::Sym2);
      d.alpha = read_horizontal(FieldKind::Sym2Tracefree);
      d.beta = read_horizontal(FieldKind::OneForm);
      d.rho = read_horizontal(FieldKind::Scalar);
      d.sigma = read_horizontal(FieldKind::Scalar);
      d.betabar = read_horizontal(FieldKind::OneForm);
      d.mu = read_horizontal(FieldKind::Scalar);
      d.validate();
      out.phys = std::move(d);
    } else if (kind == "renormalized") {
      for (std::size_t i = 0; i < std::size(kRenormalizedFields); ++i)
        expect_field(i, kRenormalizedFields[i]);
      RenormalizedConeData d;
      d.chart = chart;
      d.grid = grid;
      d.tgrid = tgrid;
      d.metric_log = read_metric();
      d.H = read_horizontal(FieldKind::Sym2);
      d.Z = read_horizontal(FieldKind::OneForm);
      d.Hbar = read_horizontal(FieldKind::Sym2);
      d.A = read_horizontal(FieldKind::Sym2Tracefree);
      d.B = read_horizontal(FieldKind::OneForm);
      d.R = read_horizontal(FieldKind::Scalar);
      d.Bbar = read_horizontal(FieldKind::OneForm);
      d.M = read_horizontal(FieldKind::Scalar);
      d.grad_trH = read_horizontal(FieldKind::OneForm);
      d.validate();
      out.ren = std::move(d);
    } else {
      throw ConeFileError("unknown cone kind: " + kind);
    }
    // Extra bytes indicate a mismatched manifest.
    is.peek();
    if (!is.eof()) throw ConeFileError("trailing bytes after field table");
    return out;
  } catch (const ConeFileError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConeFileError(std::string("malformed cone file: ") + e.what());
  }
}

std::string residual_report_json(const ResidualReport& report) {
  ordered_json j;
  ordered_json rows = ordered_json::array();
  for (const auto& e : report.entries) {
    ordered_json row;
    row["name"] = e.name;
    row["group"] = e.group;
    row["value"] = e.value;
    row["floor"] = e.floor;
    row["pass"] = e.pass;
    rows.push_back(row);
  }
  j["residuals"] = rows;
  j["all_pass"] = report.all_pass();
  return j.dump(2) + "\n";
}

std::string residual_report_csv(const ResidualReport& report) {
  std::ostringstream os;
  os << "name,group,value,floor,pass\n";
  os.precision(17);
  for (const auto& e : report.entries) {
    os << e.name << "," << e.group << "," << e.value << "," << e.floor << ","
       << (e.pass ? "true" : "false") << "\n";
  }
  return os.str();
}

std::string budget_json(const FluxBudget& budget) {
  ordered_json j;
  j["flux_gamma"] = budget.flux_gamma;
  ordered_json flux;
  for (const auto& [k, v] : budget.flux_terms) flux[k] = v;
  j["flux_terms"] = flux;
  j["init_gamma"] = budget.init_gamma;
  ordered_json init;
  for (const auto& [k, v] : budget.init_terms) init[k] = v;
  j["init_terms"] = init;
  ordered_json outn;
  for (const auto& [k, v] : budget.output_norms) outn[k] = v;
  j["output_norms"] = outn;
  ordered_json refined = ordered_json::array();
  for (const auto& r : budget.refined_curvature) {
    ordered_json row;
    row["t"] = r.t;
    row["K_minus_1_H_minus_half"] = r.k_minus_one_h_minus_half;
    row["tr_Hbar_L2"] = r.tr_hbar_l2;
    refined.push_back(row);
  }
  j["refined_curvature"] = refined;
  return j.dump(2) + "\n";
}

std::string budget_csv(const FluxBudget& budget) {
  std::ostringstream os;
  os.precision(17);
  os << "name,value\n";
  for (const auto& [k, v] : budget.flux_terms) os << k << "," << v << "\n";
  os << "flux_gamma," << budget.flux_gamma << "\n";
  for (const auto& [k, v] : budget.init_terms) os << k << "," << v << "\n";
  os << "init_gamma," << budget.init_gamma << "\n";
  for (const auto& [k, v] : budget.output_norms) os << k << "," << v << "\n";
  return os.str();
}

}  // namespace nullcone
