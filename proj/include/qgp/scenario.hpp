#pragma once

// Config-driven scenario runner behind the qgplab tool.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qgp/error.hpp"
#include "qgp/models.hpp"
#include "qgp/spectral.hpp"

namespace qgp::scenario {

/// Parse failure pointing at a line of the config and, when known, a key.
class ConfigParseError : public ConfigError {
 public:
  ConfigParseError(const std::string& what, int line, std::string key = {})
      : ConfigError(what), line_(line), key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

struct IniEntry {
  std::string value;
  int line = 0;
};

/// [section] headers, `key = value` pairs, `#` or `;` comments.
struct IniDocument {
  std::map<std::string, std::map<std::string, IniEntry>> sections;
};

IniDocument parse_ini(std::string_view text);

enum class ExperimentKind { qgp, interfere, theta, adiabatic_check, sweep };

const char* to_string(ExperimentKind kind);

/// Model family behind a preset; selects which [model] keys are legal.
enum class ModelFamily { rotating, gap_only, sphere_cap, sphere_wobble };

struct GridSpec {
  /// Exactly one of span (seconds) and periods (multiples of the drive period).
  std::optional<double> span;
  std::optional<double> periods;
  std::size_t samples = 2001;
};

struct ThetaSpec {
  std::size_t radial_cells = 256;
  std::size_t angular_cells = 256;
  /// Coarser meshes, each halving the previous, reported alongside.
  std::size_t refinements = 2;
};

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
  /// Draw this many values uniformly from [from, to] with the scenario seed
  /// instead of listing them.
  std::size_t random_count = 0;
  double from = 0.0;
  double to = 0.0;
};

struct Tolerances {
  double propagation = 1e-9;
  double degeneracy = 1e-9;
  double overlap_floor = 1e-12;
};

struct ScenarioConfig {
  std::string name = "scenario";
  ExperimentKind kind = ExperimentKind::qgp;
  std::string preset;
  ModelFamily family = ModelFamily::rotating;
  /// Resolved model parameters as written in the config (frequencies in Hz).
  std::map<std::string, double> model;
  GridSpec grid;
  GaugeMode gauge = GaugeMode::parallel_transport;
  bool swap_arms = false;
  bool fidelity = true;
  Tolerances tolerances;
  std::uint64_t seed = 0;
  ThetaSpec theta;
  SweepSpec sweep;
  std::string csv;
  std::string summary;
  /// Every section/key/value after preset defaults were applied.
  std::map<std::string, std::map<std::string, std::string>> echo;
};

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

struct PresetInfo {
  std::string name;
  std::string description;
};
std::vector<PresetInfo> list_presets();

/// Model in angular units built from the Hz parameters of the config.
ModelPtr build_model(ModelFamily family, const std::map<std::string, double>& params);

/// Period of the drive (rotation) in seconds, used by grid `periods`.
double drive_period(ModelFamily family, const std::map<std::string, double>& params);

struct RunSummary {
  std::string name;
  std::string kind;
  std::string preset;
  std::map<std::string, std::map<std::string, std::string>> scenario;
  std::map<std::string, double> model_parameters;  // angular units
  double t0 = 0.0;
  double t1 = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> headline;
  /// CSV column (or reduction of one) behind each headline scalar.
  std::map<std::string, std::string> headline_source;
  std::map<std::string, bool> flags;
  std::map<std::string, std::string> convention;
  std::vector<std::string> columns;
  std::string csv_file;
  double wall_time_s = 0.0;

  bool operator==(const RunSummary&) const = default;
};

std::string serialize(const RunSummary& summary);
RunSummary parse_summary(std::string_view json);

struct RunOptions {
  std::size_t threads = 1;
  std::optional<std::uint64_t> seed;
};

struct RunResult {
  RunSummary summary;
  /// CSV without the timestamp header line.
  std::string csv_body;
};

RunResult execute(const ScenarioConfig& config, const RunOptions& options = {});

/// Executes and writes <out_dir>/<csv> and <out_dir>/<summary> atomically.
RunResult run(const ScenarioConfig& config, const std::string& out_dir, const RunOptions& options = {});

}  // namespace qgp::scenario
