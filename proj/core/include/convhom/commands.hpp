#pragma once

// Command dispatch shared by the CLI and the tests.

#include "convhom/config.hpp"
#include "convhom/rate_certification.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace convhom {

struct CommandOptions {
  std::string out;                     ///< overrides config.output when non-empty
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::vector<Ablation> ablations;     ///< rate only
  std::string inject_fault;            ///< "" or "corrupt-q0"
  std::ostream* log = nullptr;         ///< human-readable summary, stdout when null
  std::ostream* err = nullptr;         ///< diagnostics, stderr when null
};

/// Parses a comma-separated ablation list ("no-drift,no-q0").
std::vector<Ablation> parse_ablation_list(const std::string& list);

int cmd_effective(const RunConfig& cfg, const CommandOptions& opt);
int cmd_threshold(const RunConfig& cfg, const CommandOptions& opt);
int cmd_rate(const RunConfig& cfg, const CommandOptions& opt);
int cmd_selfcheck(const RunConfig& cfg, const CommandOptions& opt);

/// Loads the config, runs the command and maps errors to exit codes:
/// 0 success, 1 verdict failure, 2 configuration error, 3 numeric error.
int run_command(const std::string& command, const std::string& config_path, const CommandOptions& opt);

}  // namespace convhom
