#pragma once

// Cross-module invariant suite run by the selfcheck command.

#include "convhom/config.hpp"
#include "convhom/problem.hpp"
#include "convhom/threshold_analysis.hpp"

#include <string>
#include <vector>

namespace convhom {

struct CheckResult {
  std::string name;
  double value = 0.0;
  std::string relation;  ///< "<=", ">=" or ">"
  double tolerance = 0.0;
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

struct SelfcheckReport {
  std::vector<CheckResult> checks;
  bool pass = false;
};

/// 20 deterministic quasimomenta spread over the dual cell [-pi, pi)^d.
std::vector<Coord> dual_cell_samples(int dim, int count = 20);

SelfcheckReport run_selfcheck(const Problem& problem, const ThresholdContext& ctx, const RunConfig& cfg);

/// Fixed-width table, one line per check.
std::string format_selfcheck(const SelfcheckReport& report);

}  // namespace convhom
