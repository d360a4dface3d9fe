#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqlab/core.hpp"
#include "eqlab/eigensolve.hpp"
#include "eqlab/eth.hpp"
#include "eqlab/hilbert.hpp"
#include "eqlab/io.hpp"
#include "eqlab/scaling.hpp"

namespace eqlab {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::string& context,
                                std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw InvalidInputError("config: '" + context + "' must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw InvalidInputError("config: unknown key '" + it.key() + "' in " + context);
  }
}

inline double get_double(const nlohmann::json& j, const std::string& context, const char* key,
                         double fallback) {
  if (!j.contains(key)) return fallback;
  const nlohmann::json& v = j.at(key);
  if (!v.is_number())
    throw InvalidInputError("config: '" + context + "." + key + "' must be a number");
  return v.get<double>();
}

inline int get_int(const nlohmann::json& j, const std::string& context, const char* key,
                   int fallback) {
  if (!j.contains(key)) return fallback;
  const nlohmann::json& v = j.at(key);
  if (!v.is_number_integer())
    throw InvalidInputError("config: '" + context + "." + key + "' must be an integer");
  return v.get<int>();
}

inline std::string get_string(const nlohmann::json& j, const std::string& context,
                              const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const nlohmann::json& v = j.at(key);
  if (!v.is_string())
    throw InvalidInputError("config: '" + context + "." + key + "' must be a string");
  return v.get<std::string>();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Command-specific configuration blocks
// ---------------------------------------------------------------------------

struct SpectrumConfig {
  double gap_tolerance = default_degeneracy_tolerance;
  int gap_max_dimension = default_gap_max_dimension;
  std::int64_t gap_samples = default_gap_samples;

  bool operator==(const SpectrumConfig&) const = default;
};

struct EvolveConfig {
  double theta = 0.0;
  double phi = 0.0;
  std::optional<Index> eigenstate_index;
  double t_max = 40.0;
  double dt = 0.05;

  bool operator==(const EvolveConfig&) const = default;
};

struct SweepConfig {
  int n_theta = default_sweep_theta_points;
  int n_phi = default_sweep_phi_points;

  bool operator==(const SweepConfig&) const = default;
};

struct ScalingConfig {
  double theta = 1.5707963267948966;
  std::vector<double> phi_values;
  int n_phi = 16;
  int n_min = default_beta_n_min;
  int n_max = default_beta_n_max;
  std::optional<double> synthetic_beta;

  std::vector<double> effective_phi_grid() const {
    if (!phi_values.empty()) return phi_values;
    return half_open_grid(0.0, 2.0 * 3.141592653589793, n_phi);
  }
  std::vector<int> n_range() const {
    std::vector<int> sizes;
    for (int n = n_min; n <= n_max; ++n) sizes.push_back(n);
    return sizes;
  }

  bool operator==(const ScalingConfig&) const = default;
};

struct OffDiagConfig {
  double bin_width = 0.0;
  double window_lo_ne = 0.25;
  double window_hi_ne = 0.75;

  bool operator==(const OffDiagConfig&) const = default;
};

struct EthConfig {
  std::string observable = "magnetization_z";
  double shell_center = 0.0;
  double shell_half_width_fraction = default_shell_width_fraction;
  double nullity_tolerance = 1e-8;
  std::optional<OffDiagConfig> offdiag;

  bool operator==(const EthConfig&) const = default;
};

/// One run's full description. Parsed strictly: any key outside the schema
/// is an error, so config typos cannot silently fall back to defaults.
struct RunConfig {
  ChainSpec model{2};
  std::string output_dir = "out";
  std::string cache_dir;
  int workers = 0;
  std::uint64_t seed = 0;
  SpectrumConfig spectrum;
  EvolveConfig evolve;
  SweepConfig sweep;
  ScalingConfig scaling;
  EthConfig eth;

  bool operator==(const RunConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

inline Boundary parse_boundary(const std::string& name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "open") return Boundary::open;
  throw InvalidInputError("config: boundary must be 'periodic' or 'open', got '" + name + "'");
}

inline RunConfig parse_config(const nlohmann::json& root) {
  detail::reject_unknown_keys(root, "top level",
                              {"model", "output_dir", "cache_dir", "workers", "seed",
                               "spectrum", "evolve", "sweep", "scaling", "eth"});
  if (!root.contains("model"))
    throw InvalidInputError("config: missing required 'model' block");

  RunConfig config;
  {
    const nlohmann::json& m = root.at("model");
    detail::reject_unknown_keys(m, "model", {"n_sites", "coupling", "field", "boundary"});
    if (!m.contains("n_sites"))
      throw InvalidInputError("config: missing required 'model.n_sites'");
    config.model.n_sites = detail::get_int(m, "model", "n_sites", 0);
    config.model.coupling = detail::get_double(m, "model", "coupling", 1.0);
    config.model.field = detail::get_double(m, "model", "field", 0.51);
    config.model.boundary = parse_boundary(detail::get_string(m, "model", "boundary", "periodic"));
    config.model.validate();
  }

  config.output_dir = detail::get_string(root, "top level", "output_dir", "out");
  config.cache_dir = detail::get_string(root, "top level", "cache_dir", "");
  config.workers = detail::get_int(root, "top level", "workers", 0);
  if (config.workers < 0)
    throw InvalidInputError("config: workers must be >= 1 (0 selects the hardware default)");
  if (root.contains("seed")) {
    const nlohmann::json& v = root.at("seed");
    if (!v.is_number_unsigned())
      throw InvalidInputError("config: 'seed' must be a non-negative integer");
    config.seed = v.get<std::uint64_t>();
  }

  if (root.contains("spectrum")) {
    const nlohmann::json& s = root.at("spectrum");
    detail::reject_unknown_keys(s, "spectrum",
                                {"gap_tolerance", "gap_max_dimension", "gap_samples"});
    config.spectrum.gap_tolerance =
        detail::get_double(s, "spectrum", "gap_tolerance", default_degeneracy_tolerance);
    config.spectrum.gap_max_dimension =
        detail::get_int(s, "spectrum", "gap_max_dimension", default_gap_max_dimension);
    if (s.contains("gap_samples")) {
      if (!s.at("gap_samples").is_number_integer())
        throw InvalidInputError("config: 'spectrum.gap_samples' must be an integer");
      config.spectrum.gap_samples = s.at("gap_samples").get<std::int64_t>();
    }
  }

  if (root.contains("evolve")) {
    const nlohmann::json& e = root.at("evolve");
    detail::reject_unknown_keys(e, "evolve",
                                {"theta", "phi", "eigenstate_index", "t_max", "dt"});
    config.evolve.theta = detail::get_double(e, "evolve", "theta", 0.0);
    config.evolve.phi = detail::get_double(e, "evolve", "phi", 0.0);
    if (e.contains("eigenstate_index")) {
      if (!e.at("eigenstate_index").is_number_integer())
        throw InvalidInputError("config: 'evolve.eigenstate_index' must be an integer");
      config.evolve.eigenstate_index = e.at("eigenstate_index").get<Index>();
    }
    config.evolve.t_max = detail::get_double(e, "evolve", "t_max", 40.0);
    config.evolve.dt = detail::get_double(e, "evolve", "dt", 0.05);
    if (!(config.evolve.dt > 0.0) || !(config.evolve.t_max > 0.0))
      throw InvalidInputError("config: evolve.t_max and evolve.dt must be > 0");
  }

  if (root.contains("sweep")) {
    const nlohmann::json& s = root.at("sweep");
    detail::reject_unknown_keys(s, "sweep", {"n_theta", "n_phi"});
    config.sweep.n_theta = detail::get_int(s, "sweep", "n_theta", default_sweep_theta_points);
    config.sweep.n_phi = detail::get_int(s, "sweep", "n_phi", default_sweep_phi_points);
    if (config.sweep.n_theta < 1 || config.sweep.n_phi < 1)
      throw InvalidInputError("config: sweep grid sizes must be >= 1");
  }

  if (root.contains("scaling")) {
    const nlohmann::json& s = root.at("scaling");
    detail::reject_unknown_keys(
        s, "scaling", {"theta", "phi_values", "n_phi", "n_min", "n_max", "synthetic_beta"});
    config.scaling.theta = detail::get_double(s, "scaling", "theta", config.scaling.theta);
    if (s.contains("phi_values")) {
      if (!s.at("phi_values").is_array())
        throw InvalidInputError("config: 'scaling.phi_values' must be an array");
      for (const nlohmann::json& v : s.at("phi_values")) {
        if (!v.is_number())
          throw InvalidInputError("config: 'scaling.phi_values' entries must be numbers");
        config.scaling.phi_values.push_back(v.get<double>());
      }
    }
    config.scaling.n_phi = detail::get_int(s, "scaling", "n_phi", config.scaling.n_phi);
    config.scaling.n_min = detail::get_int(s, "scaling", "n_min", config.scaling.n_min);
    config.scaling.n_max = detail::get_int(s, "scaling", "n_max", config.scaling.n_max);
    if (config.scaling.n_min > config.scaling.n_max)
      throw InvalidInputError("config: scaling.n_min must be <= scaling.n_max");
    if (config.scaling.n_phi < 1)
      throw InvalidInputError("config: scaling.n_phi must be >= 1");
    if (s.contains("synthetic_beta"))
      config.scaling.synthetic_beta = detail::get_double(s, "scaling", "synthetic_beta", 0.0);
  }

  if (root.contains("eth")) {
    const nlohmann::json& e = root.at("eth");
    detail::reject_unknown_keys(e, "eth",
                                {"observable", "shell_center", "shell_half_width_fraction",
                                 "nullity_tolerance", "offdiag"});
    config.eth.observable = detail::get_string(e, "eth", "observable", "magnetization_z");
    if (config.eth.observable != "magnetization_z" && config.eth.observable != "identity")
      throw InvalidInputError("config: eth.observable must be 'magnetization_z' or 'identity'");
    config.eth.shell_center = detail::get_double(e, "eth", "shell_center", 0.0);
    config.eth.shell_half_width_fraction =
        detail::get_double(e, "eth", "shell_half_width_fraction", default_shell_width_fraction);
    if (!(config.eth.shell_half_width_fraction > 0.0))
      throw InvalidInputError("config: eth.shell_half_width_fraction must be > 0");
    config.eth.nullity_tolerance = detail::get_double(e, "eth", "nullity_tolerance", 1e-8);
    if (e.contains("offdiag")) {
      const nlohmann::json& o = e.at("offdiag");
      detail::reject_unknown_keys(o, "eth.offdiag",
                                  {"bin_width", "window_lo_ne", "window_hi_ne"});
      OffDiagConfig od;
      od.bin_width = detail::get_double(o, "eth.offdiag", "bin_width",
                                        default_offdiag_bin_width * config.model.coupling);
      od.window_lo_ne = detail::get_double(o, "eth.offdiag", "window_lo_ne", 0.25);
      od.window_hi_ne = detail::get_double(o, "eth.offdiag", "window_hi_ne", 0.75);
      if (!(od.bin_width > 0.0))
        throw InvalidInputError("config: eth.offdiag.bin_width must be > 0");
      if (!(od.window_lo_ne <= od.window_hi_ne) || od.window_lo_ne < 0.0 ||
          od.window_hi_ne > 1.0)
        throw InvalidInputError("config: eth.offdiag window must satisfy 0 <= lo <= hi <= 1");
      config.eth.offdiag = od;
    }
  }

  return config;
}

// ---------------------------------------------------------------------------
// Serialization back to JSON (defaults included, so a config round-trips)
// ---------------------------------------------------------------------------

inline nlohmann::json config_to_json(const RunConfig& config) {
  nlohmann::json root;
  root["model"] = {{"n_sites", config.model.n_sites},
                   {"coupling", config.model.coupling},
                   {"field", config.model.field},
                   {"boundary", to_string(config.model.boundary)}};
  root["output_dir"] = config.output_dir;
  if (!config.cache_dir.empty()) root["cache_dir"] = config.cache_dir;
  root["workers"] = config.workers;
  root["seed"] = config.seed;
  root["spectrum"] = {{"gap_tolerance", config.spectrum.gap_tolerance},
                      {"gap_max_dimension", config.spectrum.gap_max_dimension},
                      {"gap_samples", config.spectrum.gap_samples}};
  nlohmann::json evolve = {{"theta", config.evolve.theta},
                           {"phi", config.evolve.phi},
                           {"t_max", config.evolve.t_max},
                           {"dt", config.evolve.dt}};
  if (config.evolve.eigenstate_index) evolve["eigenstate_index"] = *config.evolve.eigenstate_index;
  root["evolve"] = evolve;
  root["sweep"] = {{"n_theta", config.sweep.n_theta}, {"n_phi", config.sweep.n_phi}};
  nlohmann::json scaling = {{"theta", config.scaling.theta},
                            {"n_phi", config.scaling.n_phi},
                            {"n_min", config.scaling.n_min},
                            {"n_max", config.scaling.n_max}};
  if (!config.scaling.phi_values.empty()) scaling["phi_values"] = config.scaling.phi_values;
  if (config.scaling.synthetic_beta) scaling["synthetic_beta"] = *config.scaling.synthetic_beta;
  root["scaling"] = scaling;
  nlohmann::json eth = {{"observable", config.eth.observable},
                        {"shell_center", config.eth.shell_center},
                        {"shell_half_width_fraction", config.eth.shell_half_width_fraction},
                        {"nullity_tolerance", config.eth.nullity_tolerance}};
  if (config.eth.offdiag)
    eth["offdiag"] = {{"bin_width", config.eth.offdiag->bin_width},
                      {"window_lo_ne", config.eth.offdiag->window_lo_ne},
                      {"window_hi_ne", config.eth.offdiag->window_hi_ne}};
  root["eth"] = eth;
  return root;
}

/// Accepts either a bare config document or a manifest produced by a
/// previous run (the config is then under its "config" key).
inline RunConfig load_config_file(const std::filesystem::path& path) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& err) {
    throw InvalidInputError("config: " + path.string() + " is not valid JSON: " + err.what());
  }
  if (root.is_object() && root.contains("config")) return parse_config(root.at("config"));
  return parse_config(root);
}

inline nlohmann::json make_manifest(const std::string& command, const RunConfig& config,
                                    int workers_used, double wall_clock_seconds) {
  nlohmann::json manifest;
  manifest["command"] = command;
  manifest["config"] = config_to_json(config);
  manifest["workers_used"] = workers_used;
  manifest["wall_clock_seconds"] = wall_clock_seconds;
  manifest["software_version"] = version();
  return manifest;
}

} // namespace eqlab
