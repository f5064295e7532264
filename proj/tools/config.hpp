#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crossflow/jko.hpp"

namespace crossflow::app {

/// Settings for `crossflow run`.  Defaults reproduce the acceptance setup.
struct RunConfig {
  double domain_length = 1.0;
  int n_cells = 128;
  double tau = 1e-3;
  int n_steps = 100;
  double eps_reg = 1e-4;
  std::string preset = "two_bumps";
  std::vector<double> dg_nodes = default_dg_nodes();
  std::string output_dir = "out";
  std::uint64_t seed = 7;

  double prox_newton_tol = 1e-12;
  double scaling_tol = 1e-8;
  int max_scaling_iter = 200000;
  double mass_floor_scale = 1e-9;

  JkoConfig jko() const;
};

/// Environment lookup; returns nullopt for unset variables.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_env();

/// Prefix of environment overrides: CROSSFLOW_N_CELLS=256 overrides n_cells.
inline constexpr const char* kEnvPrefix = "CROSSFLOW_";

/// Reads a TOML file, then applies environment overrides.  Throws ConfigError
/// with code config_not_found, config_parse_error or config_invalid.
RunConfig load_config(const std::string& path, const EnvLookup& env = process_env());

/// Same, from TOML text.
RunConfig parse_config(const std::string& text, const EnvLookup& env = process_env());

void validate(const RunConfig& cfg);

}  // namespace crossflow::app
