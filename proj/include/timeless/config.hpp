#pragma once

// Experiment configuration: a JSON document with a fixed schema.  Unknown
// keys, wrong types and non-positive tolerances are reported as diagnostics
// that name the offending path (for example "clock.E").

#include "timeless/clock.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace timeless {

using Json = nlohmann::json;

struct Diagnostic {
  std::string path;
  std::string reason;
};

struct ClockSpec {
  ClockKind kind = ClockKind::PeriodicFinite;
  double energy = 0.0;
  int dimension = 0;  // 0 for the continuum clock
};

struct GridSpec {
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t n = 0;
  TimeGrid grid() const { return TimeGrid(t_min, t_max, n); }
};

struct ExperimentConfig {
  std::string experiment;
  std::optional<ClockSpec> clock;
  std::optional<Json> schedule;
  std::optional<GridSpec> grid;
  std::map<std::string, double> tolerances;  // defaults filled in
  std::filesystem::path output_dir;          // before the output-root override
  std::uint64_t seed = 0;
  Json parameters = Json::object();
  Json source;  // the document as read

  double tolerance(const std::string& name) const;
  double parameter(const std::string& name, double fallback) const;
  std::vector<double> parameter_list(const std::string& name, std::vector<double> fallback) const;
};

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
};

const std::vector<ExperimentInfo>& experiment_catalog();
std::vector<std::string> experiment_names();

/// Empty iff `document` is a valid configuration.
std::vector<Diagnostic> validate_config_json(const Json& document);
/// Reads and validates a file; unreadable or malformed files become diagnostics.
std::vector<Diagnostic> validate_config(const std::filesystem::path& path);

/// Throws ConfigError with the diagnostics when the document is invalid.
ExperimentConfig parse_config(const Json& document);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Name of the environment variable that re-roots relative output directories.
inline constexpr const char* kOutputRootVariable = "TIMELESS_OUTPUT_ROOT";
/// output_dir resolved against $TIMELESS_OUTPUT_ROOT (or the working directory).
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

}  // namespace timeless
