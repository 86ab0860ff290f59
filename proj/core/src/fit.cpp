#include "convhom/fit.hpp"

#include "convhom/common.hpp"

#include <cmath>

namespace convhom {

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) raise(ErrorKind::usage, "fit", "log-log fit needs >= 2 paired points");
  const auto n = static_cast<Index>(x.size());
  Eigen::MatrixXd M(n, 2);
  Eigen::VectorXd b(n);
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!(x[k] > 0.0) || !(y[k] > 0.0) || !std::isfinite(y[k])) {
      raise(ErrorKind::usage, "fit", "log-log fit needs positive finite values");
    }
    M(i, 0) = std::log(x[k]);
    M(i, 1) = 1.0;
    b(i) = std::log(y[k]);
  }
  const Eigen::Vector2d c = M.colPivHouseholderQr().solve(b);
  LogLogFit f;
  f.slope = c(0);
  f.intercept = c(1);
  f.residual = std::sqrt((M * c - b).squaredNorm() / static_cast<double>(n));
  f.points = static_cast<int>(n);
  return f;
}

}  // namespace convhom
