#include "convhom/fibre_operator.hpp"

#include "quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

namespace convhom {

namespace {

constexpr const char* kStage = "coercivity";

struct Cloud {
  std::vector<double> z0, z1, w;  // w = quadrature weight * a(z)
};

std::vector<std::pair<double, double>> axis_rule(double lo, double hi, std::vector<double> breaks, int panels) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double a = std::max(lo, breaks[b]);
    const double c = std::min(hi, breaks[b + 1]);
    if (!(c > a)) continue;
    const double pw = (c - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = a + (p + 0.5) * pw;
      const double half = 0.5 * pw;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        out.emplace_back(mid + half * xs[k], half * ws[k]);
        if (xs[k] != 0.0) out.emplace_back(mid - half * xs[k], half * ws[k]);
      }
    }
  }
  return out;
}

Cloud build_cloud(const KernelSpec& kernel) {
  const int d = kernel.dim();
  const int panels = d == 1 ? 32 : 8;
  Cloud cl;
  for (const auto& c : kernel.components()) {
    std::vector<std::pair<double, double>> rules[2];
    for (int ax = 0; ax < d; ++ax) {
      double lo = 0.0;
      double hi = 0.0;
      detail::effective_support(c, ax, lo, hi);
      rules[ax] = axis_rule(lo, hi, {0.0, c.center(ax)}, panels);
    }
    if (d == 1) {
      for (const auto& [x, wx] : rules[0]) {
        const double z[1] = {x};
        const double a = detail::component_density(c, 1, z);
        if (a == 0.0) continue;
        cl.z0.push_back(x);
        cl.z1.push_back(0.0);
        cl.w.push_back(wx * a);
      }
    } else {
      for (const auto& [x, wx] : rules[0]) {
        for (const auto& [y, wy] : rules[1]) {
          const double z[2] = {x, y};
          const double a = detail::component_density(c, 2, z);
          if (a < 1e-300) continue;
          cl.z0.push_back(x);
          cl.z1.push_back(y);
          cl.w.push_back(wx * wy * a);
        }
      }
    }
  }
  return cl;
}

double phi(double l) {
  if (std::abs(l) < 1e-3) {
    const double l2 = l * l;
    return 0.5 - l2 / 24.0 + l2 * l2 / 720.0;
  }
  return (1.0 - std::cos(l)) / (l * l);
}

double energy_on_cloud(const Cloud& cl, double x0, double x1) {
  double e = 0.0;
  for (std::size_t i = 0; i < cl.w.size(); ++i) {
    const double r2 = cl.z0[i] * cl.z0[i] + cl.z1[i] * cl.z1[i];
    e += cl.w[i] * r2 * std::abs(phi(x0 * cl.z0[i] + x1 * cl.z1[i]) - 0.5);
  }
  return e;
}

double spatial_extent(const KernelSpec& kernel) {
  double L = 0.0;
  for (const auto& c : kernel.components()) {
    double s = 0.0;
    switch (c.family) {
      case KernelFamily::gaussian:
        s = 4.0 * std::sqrt(c.covariance.diagonal().maxCoeff());
        break;
      case KernelFamily::box:
        s = c.halfwidths.maxCoeff();
        break;
      case KernelFamily::exponential:
        s = 4.0 / c.rate;
        break;
      case KernelFamily::mixture:
        break;
    }
    L = std::max(L, c.center.norm() + s);
  }
  return std::max(L, 1e-3);
}

// Minimum of A^ over r <= |y| <= Y: polar sampling (1D: a line) plus local refinement.
double min_symbol(const KernelSpec& kernel, double r, double Y, double step) {
  const int d = kernel.dim();
  double best = std::numeric_limits<double>::infinity();
  Coord y(d);
  Coord arg(d);
  auto eval = [&](double rho, double th) {
    if (d == 1) {
      y(0) = rho;
    } else {
      y(0) = rho * std::cos(th);
      y(1) = rho * std::sin(th);
    }
    return symbol_A_hat(kernel, y);
  };
  double best_rho = r;
  double best_th = 0.0;
  double best_dth = 0.0;
  const long nr = std::max(2L, static_cast<long>(std::ceil((Y - r) / step)) + 1);
  for (long i = 0; i < nr; ++i) {
    const double rho = std::min(Y, r + i * step);
    const int nth = d == 1 ? 1 : std::max(64, static_cast<int>(std::ceil(kPi * rho / step)));
    const double dth = kPi / nth;
    for (int t = 0; t < nth; ++t) {
      const double v = eval(rho, t * dth);
      if (v < best) {
        best = v;
        best_rho = rho;
        best_th = t * dth;
        best_dth = dth;
      }
    }
  }
  // Refine on a 33 x 33 local patch.
  for (int a = -16; a <= 16; ++a) {
    const double rho = std::clamp(best_rho + a * step / 16.0, r, Y);
    for (int b = (d == 1 ? 0 : -16); b <= (d == 1 ? 0 : 16); ++b) {
      best = std::min(best, eval(rho, best_th + b * best_dth / 16.0));
    }
  }
  return best;
}

}  // namespace

double symbol_A_hat(const KernelSpec& kernel, const Coord& y) {
  const Coord zero = Coord::Zero(kernel.dim());
  return kernel.fourier(zero).real() - kernel.fourier(y).real();
}

double coercivity_energy(const KernelSpec& kernel, const Coord& xi) {
  const Cloud cl = build_cloud(kernel);
  return energy_on_cloud(cl, xi(0), kernel.dim() == 2 ? xi(1) : 0.0);
}

CoercivityEstimate coercivity_constant(const KernelSpec& kernel) {
  const int d = kernel.dim();
  CoercivityEstimate est;
  Eigen::SelfAdjointEigenSolver<RMatrix> es(kernel.second_moment_matrix(), Eigen::EigenvaluesOnly);
  est.calM = es.eigenvalues()(0);
  if (!(est.calM > 0.0)) raise(ErrorKind::numeric, kStage, "second-moment form is not positive definite");

  // r(a): largest dyadic pi 2^-m such that every sampled |xi| <= r passes.
  const Cloud cl = build_cloud(kernel);
  constexpr int kLevels = 30;
  const int ndir = d == 1 ? 1 : 8;
  std::vector<bool> pass(kLevels + 1, true);
  for (int m = 0; m <= kLevels; ++m) {
    const double rm = kPi * std::ldexp(1.0, -m);
    for (int s = 1; s <= 4 && pass[static_cast<std::size_t>(m)]; ++s) {
      const double rho = rm * s / 4.0;
      for (int t = 0; t < ndir; ++t) {
        const double th = kPi * t / ndir;
        if (energy_on_cloud(cl, rho * std::cos(th), rho * std::sin(th)) > 0.25 * est.calM) {
          pass[static_cast<std::size_t>(m)] = false;
          break;
        }
      }
    }
  }
  int level = -1;
  for (int m = kLevels; m >= 0; --m) {
    if (!pass[static_cast<std::size_t>(m)]) break;
    level = m;
  }
  if (level < 0) raise(ErrorKind::numeric, kStage, "no admissible radius r(a) found");
  est.r = kPi * std::ldexp(1.0, -level);

  const double smin = kernel.min_scale();
  est.search_radius = std::max(8.0 * kPi, 10.0 / smin);
  const double step = kTwoPi / (64.0 * spatial_extent(kernel));
  est.C_r = min_symbol(kernel, est.r, est.search_radius, step);
  est.C_pi = est.r >= kPi ? est.C_r : min_symbol(kernel, kPi, est.search_radius, step);

  // Plateau beyond the search box.
  const double mass = kernel.mass();
  const double Y = est.search_radius;
  double plateau = std::numeric_limits<double>::infinity();
  double edge = 0.0;
  Coord y(d);
  for (int i = 0; i <= 64; ++i) {
    const double rho = Y * (1.0 + i / 64.0);
    const int nth = d == 1 ? 1 : 64;
    for (int t = 0; t < nth; ++t) {
      const double th = kPi * t / nth;
      y(0) = rho * std::cos(th);
      if (d == 2) y(1) = rho * std::sin(th);
      const double v = symbol_A_hat(kernel, y);
      plateau = std::min(plateau, v);
      if (i == 0) edge = std::max(edge, std::abs(v - mass) / mass);
    }
  }
  est.plateau_min = plateau;
  est.edge_deviation = edge;
  est.plateau_ok = plateau >= std::min(est.C_r, est.C_pi) * (1.0 - 1e-12);

  const double denom = kPi * kPi * d;
  est.C = std::min({0.25 * est.calM, est.C_r / denom, est.C_pi / denom});
  if (!(est.C_r > 0.0) || !(est.C_pi > 0.0) || !(est.C > 0.0)) {
    raise(ErrorKind::numeric, kStage, "coercivity minimum is not positive");
  }
  return est;
}

}  // namespace convhom
