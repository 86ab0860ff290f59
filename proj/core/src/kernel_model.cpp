#include "convhom/kernel_model.hpp"

#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace convhom {

namespace {

constexpr const char* kStage = "kernel_model";

void check_dim(int dim) {
  if (dim != 1 && dim != 2) {
    raise(ErrorKind::configuration, kStage, "dimension must be 1 or 2, got " + std::to_string(dim));
  }
}

void check_amplitude(double amplitude) {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    raise(ErrorKind::configuration, kStage, "kernel amplitude must be positive and finite");
  }
}

void check_center(const Coord& center) {
  check_dim(static_cast<int>(center.size()));
  if (!center.allFinite()) raise(ErrorKind::configuration, kStage, "kernel center must be finite");
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0 + x * x * x * x / 120.0;
  return std::sin(x) / x;
}

Complex component_fourier(const KernelComponent& c, std::span<const double> k) {
  const Index d = c.center.size();
  double phase = 0.0;
  for (Index i = 0; i < d; ++i) phase += k[i] * c.center(i);
  double modulus = c.amplitude;
  switch (c.family) {
    case KernelFamily::gaussian: {
      double q = 0.0;
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) q += k[i] * c.covariance(i, j) * k[j];
      modulus *= std::exp(-0.5 * q);
      break;
    }
    case KernelFamily::box:
      for (Index i = 0; i < d; ++i) modulus *= sinc(k[i] * c.halfwidths(i));
      break;
    case KernelFamily::exponential:
      for (Index i = 0; i < d; ++i) {
        const double r = k[i] / c.rate;
        modulus /= 1.0 + r * r;
      }
      break;
    case KernelFamily::mixture:
      break;
  }
  return modulus * std::polar(1.0, -phase);
}

RMatrix component_second_moment(const KernelComponent& c) {
  const Index d = c.center.size();
  RMatrix m = c.center * c.center.transpose();
  switch (c.family) {
    case KernelFamily::gaussian:
      m += c.covariance;
      break;
    case KernelFamily::box:
      for (Index i = 0; i < d; ++i) m(i, i) += c.halfwidths(i) * c.halfwidths(i) / 3.0;
      break;
    case KernelFamily::exponential:
      for (Index i = 0; i < d; ++i) m(i, i) += 2.0 / (c.rate * c.rate);
      break;
    case KernelFamily::mixture:
      break;
  }
  return c.amplitude * m;
}

// Closed form of int |z|^k a_c(z) dz when one exists; NaN otherwise.
double component_moment_closed(const KernelComponent& c, int k) {
  if (k == 0) return c.amplitude;
  if (k == 2) return component_second_moment(c).trace();
  if (c.center.size() != 1) return std::nan("");
  const double ctr = c.center(0);
  switch (c.family) {
    case KernelFamily::gaussian:
      if (ctr == 0.0) {
        const double s = std::sqrt(c.covariance(0, 0));
        const double root = std::sqrt(2.0 / kPi);
        return c.amplitude * (k == 1 ? s * root : 2.0 * root * s * s * s);
      }
      return std::nan("");
    case KernelFamily::box: {
      auto prim = [k](double x) { return std::copysign(std::pow(std::abs(x), k + 1) / (k + 1), x); };
      const double h = c.halfwidths(0);
      return c.amplitude * (prim(ctr + h) - prim(ctr - h)) / (2.0 * h);
    }
    case KernelFamily::exponential:
      if (ctr == 0.0) return c.amplitude * std::tgamma(k + 1.0) / std::pow(c.rate, k);
      return std::nan("");
    case KernelFamily::mixture:
      break;
  }
  return std::nan("");
}

}  // namespace

const char* to_string(KernelFamily family) noexcept {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::box: return "box";
    case KernelFamily::exponential: return "exponential";
    case KernelFamily::mixture: return "mixture";
  }
  return "unknown";
}

KernelSpec KernelSpec::gaussian(Coord center, RMatrix covariance, double amplitude) {
  check_center(center);
  check_amplitude(amplitude);
  const Index d = center.size();
  if (covariance.rows() != d || covariance.cols() != d) {
    raise(ErrorKind::configuration, kStage, "gaussian covariance must be d x d");
  }
  if (!covariance.allFinite() || (covariance - covariance.transpose()).norm() > 1e-14 * covariance.norm()) {
    raise(ErrorKind::configuration, kStage, "gaussian covariance must be finite and symmetric");
  }
  Eigen::LLT<RMatrix> llt(covariance);
  if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().minCoeff() <= 0.0) {
    raise(ErrorKind::configuration, kStage, "gaussian covariance is not positive definite");
  }
  KernelComponent c;
  c.family = KernelFamily::gaussian;
  c.center = std::move(center);
  c.covariance = std::move(covariance);
  c.amplitude = amplitude;
  c.precision = llt.solve(RMatrix::Identity(d, d));
  const double det = c.covariance.determinant();
  c.normalization = amplitude / std::sqrt(std::pow(kTwoPi, static_cast<double>(d)) * det);

  KernelSpec s;
  s.family_ = KernelFamily::gaussian;
  s.dim_ = static_cast<int>(d);
  s.components_.push_back(std::move(c));
  return s;
}

KernelSpec KernelSpec::box(Coord center, Coord halfwidths, double amplitude) {
  check_center(center);
  check_amplitude(amplitude);
  const Index d = center.size();
  if (halfwidths.size() != d) raise(ErrorKind::configuration, kStage, "box halfwidths must have d entries");
  if (!halfwidths.allFinite() || halfwidths.minCoeff() <= 0.0) {
    raise(ErrorKind::configuration, kStage, "box halfwidths must be positive");
  }
  KernelComponent c;
  c.family = KernelFamily::box;
  c.center = std::move(center);
  c.halfwidths = std::move(halfwidths);
  c.amplitude = amplitude;
  c.normalization = amplitude / (2.0 * c.halfwidths).prod();

  KernelSpec s;
  s.family_ = KernelFamily::box;
  s.dim_ = static_cast<int>(d);
  s.components_.push_back(std::move(c));
  return s;
}

KernelSpec KernelSpec::exponential(Coord center, double rate, double amplitude) {
  check_center(center);
  check_amplitude(amplitude);
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    raise(ErrorKind::configuration, kStage, "exponential rate must be positive");
  }
  const Index d = center.size();
  KernelComponent c;
  c.family = KernelFamily::exponential;
  c.center = std::move(center);
  c.rate = rate;
  c.amplitude = amplitude;
  c.normalization = amplitude * std::pow(0.5 * rate, static_cast<double>(d));

  KernelSpec s;
  s.family_ = KernelFamily::exponential;
  s.dim_ = static_cast<int>(d);
  s.components_.push_back(std::move(c));
  return s;
}

KernelSpec KernelSpec::mixture(const std::vector<KernelSpec>& parts) {
  if (parts.empty()) raise(ErrorKind::configuration, kStage, "mixture needs at least one component");
  KernelSpec s;
  s.family_ = KernelFamily::mixture;
  s.dim_ = parts.front().dim();
  for (const auto& p : parts) {
    if (p.dim() != s.dim_) raise(ErrorKind::configuration, kStage, "mixture components differ in dimension");
    for (const auto& c : p.components()) s.components_.push_back(c);
  }
  return s;
}

double KernelSpec::mass() const noexcept {
  double m = 0.0;
  for (const auto& c : components_) m += c.amplitude;
  return m;
}

double KernelSpec::operator()(std::span<const double> z) const {
  double v = 0.0;
  for (const auto& c : components_) v += detail::component_density(c, dim_, z.data());
  return v;
}

double KernelSpec::operator()(const Coord& z) const {
  return (*this)(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())));
}

Complex KernelSpec::fourier(std::span<const double> k) const {
  Complex v = 0.0;
  for (const auto& c : components_) v += component_fourier(c, k);
  return v;
}

Complex KernelSpec::fourier(const Coord& k) const {
  return fourier(std::span<const double>(k.data(), static_cast<std::size_t>(k.size())));
}

Coord KernelSpec::first_moment_vector() const {
  Coord m = Coord::Zero(dim_);
  for (const auto& c : components_) m += c.amplitude * c.center;
  return m;
}

RMatrix KernelSpec::second_moment_matrix() const {
  RMatrix m = RMatrix::Zero(dim_, dim_);
  for (const auto& c : components_) m += component_second_moment(c);
  return m;
}

double KernelSpec::min_scale() const {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& c : components_) {
    switch (c.family) {
      case KernelFamily::gaussian:
        s = std::min(s, std::sqrt(Eigen::SelfAdjointEigenSolver<RMatrix>(c.covariance).eigenvalues().minCoeff()));
        break;
      case KernelFamily::box:
        s = std::min(s, c.halfwidths.minCoeff());
        break;
      case KernelFamily::exponential:
        s = std::min(s, 1.0 / c.rate);
        break;
      case KernelFamily::mixture:
        break;
    }
  }
  return s;
}

double eval_kernel(const KernelSpec& spec, const Coord& z) {
  if (z.size() != spec.dim()) raise(ErrorKind::usage, kStage, "point dimension does not match kernel");
  return spec(z);
}

double moment(const KernelSpec& spec, int k) {
  if (k < 0 || k > 3) raise(ErrorKind::usage, kStage, "moment order must be in 0..3");
  if (k == 0) return spec.mass();
  if (k == 2) return spec.second_moment_matrix().trace();
  double total = 0.0;
  const int d = spec.dim();
  for (const auto& c : spec.components()) {
    const double closed = component_moment_closed(c, k);
    if (std::isfinite(closed)) {
      total += closed;
      continue;
    }
    detail::Weight w = [k, d](const double* z) {
      double r2 = z[0] * z[0];
      if (d == 2) r2 += z[1] * z[1];
      return std::pow(r2, 0.5 * k);
    };
    total += detail::integrate_component(c, d, w, detail::Box{}, 1e-10);
  }
  if (!std::isfinite(total)) raise(ErrorKind::configuration, kStage, "kernel moment diverges");
  return total;
}

std::array<double, 4> moments(const KernelSpec& spec) {
  return {moment(spec, 0), moment(spec, 1), moment(spec, 2), moment(spec, 3)};
}

// ---------------------------------------------------------------------------
// Truncation

double truncation_tail(const KernelSpec& spec, int radius) {
  const int d = spec.dim();
  const double r = radius;
  detail::Weight w = [d](const double* z) {
    double m = std::abs(z[0]);
    if (d == 2) m = std::max(m, std::abs(z[1]));
    return 1.0 + m * m * m;
  };
  // {|w|_inf > R} is covered by the union of the per-axis half-spaces.
  double tail = 0.0;
  for (int ax = 0; ax < d; ++ax) {
    detail::Box left;
    left.hi[ax] = -r;
    detail::Box right;
    right.lo[ax] = r;
    tail += detail::integrate_kernel(spec, w, left, 1e-10);
    tail += detail::integrate_kernel(spec, w, right, 1e-10);
  }
  return tail;
}

TruncationPlan select_truncation(const KernelSpec& spec, double tau, int radius_cap) {
  if (!(tau > 0.0)) raise(ErrorKind::configuration, kStage, "truncation tolerance must be positive");
  for (int r = 0; r <= radius_cap; ++r) {
    // Quadrature carries relative error ~1e-10; keep that as a safety margin.
    const double tail = truncation_tail(spec, r) * (1.0 + 1e-8);
    if (tail <= tau) return TruncationPlan{r, tail, tau};
  }
  std::ostringstream os;
  os << "lattice radius would exceed cap " << radius_cap << " for tau=" << tau
     << "; use a kernel with lighter tails or a larger truncation.tau";
  raise(ErrorKind::configuration, kStage, os.str());
}

Complex periodized_kernel(const KernelSpec& spec, const Coord& xi, const Coord& z,
                          const TruncationPlan& plan) {
  return -periodized_kernel_derivative(spec, xi, z, plan, {0, 0});
}

Complex periodized_kernel_derivative(const KernelSpec& spec, const Coord& xi, const Coord& z,
                                     const TruncationPlan& plan, std::array<int, 2> alpha) {
  const int d = spec.dim();
  if (xi.size() != d || z.size() != d) raise(ErrorKind::usage, kStage, "dimension mismatch");
  if (d == 1 && alpha[1] != 0) raise(ErrorKind::usage, kStage, "alpha[1] must be 0 in 1D");
  const int R = plan.radius;
  Complex sum = 0.0;
  double w[2] = {0.0, 0.0};
  const int n1max = d == 2 ? R : 0;
  for (int n0 = -R; n0 <= R; ++n0) {
    for (int n1 = -n1max; n1 <= n1max; ++n1) {
      w[0] = z(0) + n0;
      double phase = xi(0) * w[0];
      if (d == 2) {
        w[1] = z(1) + n1;
        phase += xi(1) * w[1];
      }
      const double a = spec(std::span<const double>(w, static_cast<std::size_t>(d)));
      if (a == 0.0) continue;
      double mono = std::pow(w[0], alpha[0]);
      if (d == 2) mono *= std::pow(w[1], alpha[1]);
      sum += mono * a * std::polar(1.0, -phase);
    }
  }
  const int order = alpha[0] + alpha[1];
  Complex factor = -1.0;
  for (int i = 0; i < order; ++i) factor *= Complex(0.0, -1.0);
  return factor * sum;
}

// ---------------------------------------------------------------------------
// Coefficient mu

const char* to_string(MuFamily family) noexcept {
  switch (family) {
    case MuFamily::constant: return "constant";
    case MuFamily::exp_trig: return "exp_trig";
    case MuFamily::separable_trig: return "separable_trig";
  }
  return "unknown";
}

double TrigPolynomial::operator()(std::span<const double> x) const {
  double v = constant;
  for (const auto& m : modes) {
    double t = 0.0;
    for (std::size_t i = 0; i < m.k.size(); ++i) t += m.k[i] * x[i];
    t *= kTwoPi;
    v += m.cos_coeff * std::cos(t) + m.sin_coeff * std::sin(t);
  }
  return v;
}

namespace {

void check_modes(const std::vector<int>& k, int dim, const char* what) {
  if (static_cast<int>(k.size()) != dim) {
    raise(ErrorKind::configuration, kStage, std::string(what) + " must have d entries");
  }
}

// Extremes of a trig polynomial on [0,1)^d: dense grid plus 4x refinement
// around the extreme nodes.
std::pair<double, double> trig_extremes(const TrigPolynomial& f, int dim) {
  int kmax = 1;
  for (const auto& m : f.modes)
    for (int k : m.k) kmax = std::max(kmax, std::abs(k));
  const int n = dim == 1 ? std::max(1024, 64 * kmax) : std::max(128, 16 * kmax);
  const double h = 1.0 / n;
  double best_lo = std::numeric_limits<double>::infinity();
  double best_hi = -best_lo;
  double x_lo[2] = {0, 0};
  double x_hi[2] = {0, 0};
  const int n1 = dim == 2 ? n : 1;
  double x[2] = {0, 0};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n1; ++j) {
      x[0] = i * h;
      x[1] = j * h;
      const double v = f(std::span<const double>(x, 2));
      if (v < best_lo) { best_lo = v; x_lo[0] = x[0]; x_lo[1] = x[1]; }
      if (v > best_hi) { best_hi = v; x_hi[0] = x[0]; x_hi[1] = x[1]; }
    }
  }
  auto refine = [&](const double* c, bool minimize, double& best) {
    const int m = 8;  // +-h sampled at spacing h/4
    const int m1 = dim == 2 ? m : 0;
    double y[2] = {0, 0};
    for (int a = -m; a <= m; ++a) {
      for (int b = -m1; b <= m1; ++b) {
        y[0] = c[0] + a * h / 4.0;
        y[1] = c[1] + b * h / 4.0;
        const double v = f(std::span<const double>(y, 2));
        best = minimize ? std::min(best, v) : std::max(best, v);
      }
    }
  };
  refine(x_lo, true, best_lo);
  refine(x_hi, false, best_hi);
  return {best_lo, best_hi};
}

}  // namespace

MuSpec MuSpec::constant(int dim, double value) {
  check_dim(dim);
  if (!(value > 0.0) || !std::isfinite(value)) {
    raise(ErrorKind::configuration, kStage, "mu.value must be positive");
  }
  MuSpec s;
  s.family_ = MuFamily::constant;
  s.dim_ = dim;
  s.value_ = value;
  s.bounds_ = mu_bounds(s);
  return s;
}

MuSpec MuSpec::exp_trig(int dim, std::vector<ExpTrigTerm> terms) {
  check_dim(dim);
  for (const auto& t : terms) {
    check_modes(t.kx, dim, "mu.terms[].kx");
    check_modes(t.ky, dim, "mu.terms[].ky");
    if (!std::isfinite(t.beta)) raise(ErrorKind::configuration, kStage, "mu.terms[].beta must be finite");
  }
  MuSpec s;
  s.family_ = MuFamily::exp_trig;
  s.dim_ = dim;
  s.terms_ = std::move(terms);
  s.bounds_ = mu_bounds(s);
  return s;
}

MuSpec MuSpec::separable(int dim, TrigPolynomial f, TrigPolynomial g) {
  check_dim(dim);
  for (const auto& m : f.modes) check_modes(m.k, dim, "mu.f.modes[].k");
  for (const auto& m : g.modes) check_modes(m.k, dim, "mu.g.modes[].k");
  MuSpec s;
  s.family_ = MuFamily::separable_trig;
  s.dim_ = dim;
  s.f_ = std::move(f);
  s.g_ = std::move(g);
  s.bounds_ = mu_bounds(s);
  return s;
}

double MuSpec::operator()(std::span<const double> x, std::span<const double> y) const {
  switch (family_) {
    case MuFamily::constant:
      return value_;
    case MuFamily::exp_trig: {
      double e = 0.0;
      for (const auto& t : terms_) {
        double arg = 0.0;
        for (int i = 0; i < dim_; ++i) arg += t.kx[i] * x[i] + t.ky[i] * y[i];
        arg *= kTwoPi;
        e += t.beta * (t.trig == Trig::cos ? std::cos(arg) : std::sin(arg));
      }
      return std::exp(e);
    }
    case MuFamily::separable_trig:
      return f_(x) * g_(y);
  }
  return 0.0;
}

double MuSpec::operator()(const Coord& x, const Coord& y) const {
  return (*this)(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                 std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
}

std::pair<double, double> mu_bounds(const MuSpec& spec) {
  switch (spec.family()) {
    case MuFamily::constant:
      return {spec.constant_value(), spec.constant_value()};
    case MuFamily::exp_trig: {
      double s = 0.0;
      for (const auto& t : spec.terms()) s += std::abs(t.beta);
      return {std::exp(-s), std::exp(s)};
    }
    case MuFamily::separable_trig: {
      const auto [flo, fhi] = trig_extremes(spec.f(), spec.dim());
      const auto [glo, ghi] = trig_extremes(spec.g(), spec.dim());
      if (!(flo > 0.0)) {
        raise(ErrorKind::configuration, kStage, "mu.f is not positive (min " + std::to_string(flo) + ")");
      }
      if (!(glo > 0.0)) {
        raise(ErrorKind::configuration, kStage, "mu.g is not positive (min " + std::to_string(glo) + ")");
      }
      return {flo * glo, fhi * ghi};
    }
  }
  return {0.0, 0.0};
}

}  // namespace convhom
