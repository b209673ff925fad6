#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hysup/presets.hpp"

namespace hysup::cli {

/// Configuration problem tied to a specific field path (reported in the
/// machine-readable error JSON and mapped to exit code 2).
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_path, const std::string& message)
      : std::runtime_error(message), field(std::move(field_path)) {}
};

struct SweepSpec {
  enum class Kind { Delta, Initial, Param };
  Kind kind = Kind::Delta;
  std::vector<double> values;  // Delta / Param
  std::string param_key;       // Param
  int grid_n = 0;              // Initial: n x n grid
  double x1_min = 0, x1_max = 0, x2_min = 0, x2_max = 0;
};

struct RunSpec {
  Scenario scenario;
  DisturbanceProfile disturbance;
  std::optional<SweepSpec> sweep;
};

/// Parses a scenario document (preset plus overrides). Throws ConfigError
/// naming the offending field.
RunSpec parse_run_spec(const nlohmann::json& doc);

/// Applies --param key=value overrides onto the JSON document; bare keys go
/// into "params", dotted keys into their section.
void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& overrides);

nlohmann::json load_json_file(const std::string& path);

}  // namespace hysup::cli
