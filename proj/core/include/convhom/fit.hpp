#pragma once

#include <vector>

namespace convhom {

/// log y = slope * log x + intercept by least squares; residual is the RMS
/// of the fit residuals in log space.
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  int points = 0;
};

/// Requires >= 2 points with x, y > 0; throws a usage error otherwise.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace convhom
