#include "nullcone/run_config.hpp"

#include <fstream>

#include "json.hpp"
#include "nullcone/cone_io.hpp"
#include "nullcone/errors.hpp"

namespace nullcone {

void RunConfig::validate() const {
  if (lmax < 4) throw ParameterError("config: lmax must be >= 4");
  if (n_t < 4) throw ParameterError("config: n_t must be >= 4");
  if (!(t_max > 0.0 && t_max < 1.0)) throw ParameterError("config: t_max must be in (0, 1)");
  if (!(s0 > 2.0 * m)) throw DomainError("config: s0 must exceed 2m");
  if (!(m >= 0.0)) throw DomainError("config: m must be nonnegative");
  if (!(eps >= 0.0)) throw ParameterError("config: eps must be nonnegative");
  if (!(residual_floor > 0.0)) throw ParameterError("config: residual floor must be positive");
}

void load_config(const std::string& path, RunConfig& cfg) {
  std::ifstream is(path);
  if (!is) throw ConeFileError("cannot open config " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw ConeFileError(std::string("config parse failure: ") + e.what());
  }
  auto get = [&](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
  };
  get("lmax", cfg.lmax);
  get("n_t", cfg.n_t);
  get("t_max", cfg.t_max);
  get("s0", cfg.s0);
  get("m", cfg.m);
  get("seed", cfg.seed);
  get("eps", cfg.eps);
  get("l_cut", cfg.l_cut);
  get("residual_floor", cfg.residual_floor);
  get("trh_ceiling", cfg.trh_ceiling);
}

}  // namespace nullcone
