#include "quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace convhom::detail {

namespace {

constexpr unsigned kMaxDepth = 18;

double gk(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, kMaxDepth, tol,
                                                                       &err);
}

}  // namespace

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    std::vector<double> breaks, double tol) {
  if (!(b > a)) return 0.0;
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  double prev = a;
  for (double x : breaks) {
    if (x <= prev) continue;
    if (x > b) x = b;
    total += gk(f, prev, x, tol);
    prev = x;
    if (prev >= b) break;
  }
  return total;
}

void effective_support(const KernelComponent& c, int axis, double& lo, double& hi) {
  const double ctr = c.center(axis);
  double w = 0.0;
  switch (c.family) {
    case KernelFamily::gaussian:
      w = 16.0 * std::sqrt(c.covariance(axis, axis));
      break;
    case KernelFamily::box:
      w = c.halfwidths(axis);
      break;
    case KernelFamily::exponential:
      w = 100.0 / c.rate;
      break;
    case KernelFamily::mixture:
      break;
  }
  lo = ctr - w;
  hi = ctr + w;
}

double component_density(const KernelComponent& c, int dim, const double* z) {
  switch (c.family) {
    case KernelFamily::gaussian: {
      double q = 0.0;
      if (dim == 1) {
        const double u = z[0] - c.center(0);
        q = u * u * c.precision(0, 0);
      } else {
        const double u0 = z[0] - c.center(0);
        const double u1 = z[1] - c.center(1);
        q = u0 * u0 * c.precision(0, 0) + 2.0 * u0 * u1 * c.precision(0, 1) +
            u1 * u1 * c.precision(1, 1);
      }
      return c.normalization * std::exp(-0.5 * q);
    }
    case KernelFamily::box:
      for (int i = 0; i < dim; ++i) {
        const double u = z[i] - c.center(i);
        if (u < -c.halfwidths(i) || u >= c.halfwidths(i)) return 0.0;
      }
      return c.normalization;
    case KernelFamily::exponential: {
      double s = 0.0;
      for (int i = 0; i < dim; ++i) s += std::abs(z[i] - c.center(i));
      return c.normalization * std::exp(-c.rate * s);
    }
    case KernelFamily::mixture:
      break;
  }
  return 0.0;
}

double integrate_component(const KernelComponent& c, int dim, const Weight& weight, const Box& box,
                           double tol) {
  double lo[2];
  double hi[2];
  std::vector<double> breaks[2];
  for (int ax = 0; ax < dim; ++ax) {
    effective_support(c, ax, lo[ax], hi[ax]);
    lo[ax] = std::max(lo[ax], box.lo[ax]);
    hi[ax] = std::min(hi[ax], box.hi[ax]);
    if (!(hi[ax] > lo[ax])) return 0.0;
    breaks[ax] = {0.0, c.center(ax)};
  }

  if (dim == 1) {
    auto f = [&](double x) {
      const double z[1] = {x};
      return weight(z) * component_density(c, 1, z);
    };
    return integrate_1d(f, lo[0], hi[0], breaks[0], tol);
  }

  auto outer = [&](double x0) {
    auto inner = [&](double x1) {
      const double z[2] = {x0, x1};
      return weight(z) * component_density(c, 2, z);
    };
    return integrate_1d(inner, lo[1], hi[1], breaks[1], tol * 1e-2);
  };
  return integrate_1d(outer, lo[0], hi[0], breaks[0], tol);
}

double integrate_kernel(const KernelSpec& spec, const Weight& weight, const Box& box, double tol) {
  double total = 0.0;
  for (const auto& c : spec.components()) {
    total += integrate_component(c, spec.dim(), weight, box, tol);
  }
  return total;
}

}  // namespace convhom::detail
