#pragma once

// Run configuration: a single JSON document with a schema_version field.
// Unknown keys are rejected at every level.

#include "convhom/kernel_model.hpp"
#include "convhom/problem.hpp"
#include "convhom/rate_certification.hpp"

#include <map>
#include <optional>
#include <string>

namespace convhom {

inline constexpr int kSchemaVersion = 1;

struct ThresholdConfig {
  int count = 12;
  Coord direction;  ///< empty selects the default direction
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string fixture;  ///< built-in fixture name; empty when kernel/mu are explicit
  std::optional<KernelSpec> kernel;
  std::optional<MuSpec> mu;
  int d = 1;
  int n = 64;
  double tau = 1e-12;
  int radius_cap = 64;
  SweepConfig sweep;
  ThresholdConfig threshold;
  std::map<std::string, double> tolerances;  ///< always holds every known name
  std::string output = "out";

  double tol(const std::string& name) const;
  ProblemOptions problem_options() const;
};

/// Named tolerances with their defaults.
const std::map<std::string, double>& default_tolerances();

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
/// Canonical JSON text (sorted keys, 2-space indent, trailing newline).
std::string serialize_config(const RunConfig& cfg);

}  // namespace convhom
