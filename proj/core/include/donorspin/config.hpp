#pragma once

#include <optional>
#include <string>
#include <vector>

#include "donorspin/extrapolation.hpp"
#include "donorspin/spectroscopy.hpp"

namespace donorspin {

enum class Subcommand { CptSweep, PowerSeries, Energetics, Extrapolate, Levels };

std::string subcommand_name(Subcommand sc);
Subcommand subcommand_from(const std::string& name);  // throws ValidationError

struct BindingPartRef {
  std::string defect;
  int q = 0;
};

struct BindingSpec {
  std::string complex_name;
  int complex_q = 0;
  std::vector<BindingPartRef> parts;
};

struct EnergeticsConfig {
  std::string defect_table;
  std::string chemical_potentials;
  double gap_ev = 3.31;
  int ef_grid_points = 200;
  std::optional<BindingSpec> binding;
};

struct ExtrapolateConfig {
  std::string points_table;
  int n_min = 432;
  std::optional<HyperfinePoint> anchor;
};

/// Fully resolved run description. threads and output_dir are execution
/// knobs: the CLI may override them and they are excluded from the config
/// hash, so results do not depend on them.
struct RunConfig {
  Subcommand subcommand = Subcommand::CptSweep;
  std::string output_dir = "out";
  int threads = 1;
  double temperature_k = 8.0;
  SweepConfig sweep;
  std::vector<double> power_rabi_hz;
  EnergeticsConfig energetics;
  ExtrapolateConfig extrapolate;
};

/// Parses and validates a JSON config. All defaults are resolved; unknown
/// fields are rejected with their field path; table paths are resolved
/// against the config file's directory and must exist for the active
/// subcommand.
RunConfig parse_config(const std::string& path);

/// Canonical JSON echo of the resolved config (stable key order, trailing
/// newline). Reparsing the echo reproduces the identical echo.
std::string resolved_config_text(const RunConfig& cfg);

/// FNV-1a 64-bit hash (hex) of the echo with execution knobs removed;
/// embedded in every output artifact.
std::string config_hash(const RunConfig& cfg);

}  // namespace donorspin
