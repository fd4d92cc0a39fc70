#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mchom/cell_solver.hpp"
#include "mchom/coefficients.hpp"

namespace mchom {

enum class RunMode { Hier, Full, Both };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& s);

/// Optional homogenized-equation block of a run configuration.  Initial
/// data and the source are named closed-form fields (see
/// named_scalar_field).
struct MacroSolverConfig {
  double dt = 1e-3;
  double t_end = 0.0;
  std::string g1 = "zero";
  std::string g2 = "zero";
  std::string q = "zero";
  std::vector<double> snapshot_times;
  int mesh_n = 32;  ///< elements per axis of the macro mesh
};

/// A fully validated run description.  Parsing rejects unknown keys and
/// out-of-range values up front, so a constructed RunConfig is always
/// runnable and no partial outputs are ever produced from a bad file.
struct RunConfig {
  CoefficientModel model = CoefficientModel::constant(1.0, 1.0, 1.0);
  int base_n = 2;
  int L = 3;
  int macro_dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  double H = 0.5;
  int interp_points = 1;
  RunMode mode = RunMode::Both;
  std::string output_dir = "out";
  bool reproducible = false;
  int workers = 1;
  int qorder = 3;
  SolveOptions solver{};
  std::optional<MacroSolverConfig> macro_solver;
};

/// Parses and validates a configuration document.  Throws ConfigError with
/// a one-line diagnostic naming the offending key.
RunConfig parse_config_json(const nlohmann::ordered_json& doc);

/// Reads, parses and validates a configuration file.  Throws IoError when
/// the file cannot be read and ConfigError when it does not validate.
RunConfig parse_config_file(const std::string& path);

/// Normalized echo of a configuration, suitable for the run manifest:
/// re-parsing the echo yields an equivalent RunConfig.
nlohmann::ordered_json config_echo(const RunConfig& config);

}  // namespace mchom
