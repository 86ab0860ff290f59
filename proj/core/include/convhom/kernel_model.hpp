#pragma once

// Analytic convolution kernels a(z) >= 0, periodic coefficients mu(x, y),
// kernel moments and the lattice-periodized kernel
//
//   a~(xi, z) = sum_{n in Z^d} a(z + n) exp(-i <xi, z + n>)
//
// truncated to a certified number of lattice shells.

#include "convhom/common.hpp"

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace convhom {

enum class KernelFamily { gaussian, box, exponential, mixture };

const char* to_string(KernelFamily family) noexcept;

/// One analytic piece of a kernel. `amplitude` is the L1 mass of the piece:
/// a(z) = amplitude * (normalized density of the family).
struct KernelComponent {
  KernelFamily family = KernelFamily::gaussian;
  Coord center;
  RMatrix covariance;  ///< gaussian only, SPD d x d
  Coord halfwidths;    ///< box only, positive per axis
  double rate = 1.0;   ///< exponential only: product of Laplace(center_i, 1/rate)
  double amplitude = 1.0;

  // Derived at construction.
  RMatrix precision;       ///< covariance^{-1} (gaussian)
  double normalization = 0.0;
};

class KernelSpec {
 public:
  static KernelSpec gaussian(Coord center, RMatrix covariance, double amplitude = 1.0);
  static KernelSpec box(Coord center, Coord halfwidths, double amplitude = 1.0);
  static KernelSpec exponential(Coord center, double rate, double amplitude = 1.0);
  /// Finite sum of non-mixture kernels of equal dimension.
  static KernelSpec mixture(const std::vector<KernelSpec>& parts);

  KernelFamily family() const noexcept { return family_; }
  int dim() const noexcept { return dim_; }
  const std::vector<KernelComponent>& components() const noexcept { return components_; }

  /// ||a||_{L1}.
  double mass() const noexcept;

  double operator()(std::span<const double> z) const;
  double operator()(const Coord& z) const;

  /// a^(k) = int a(x) exp(-i <k, x>) dx in closed form.
  Complex fourier(std::span<const double> k) const;
  Complex fourier(const Coord& k) const;

  /// int z a(z) dz.
  Coord first_moment_vector() const;
  /// int z z^T a(z) dz.
  RMatrix second_moment_matrix() const;

  /// Smallest length scale across components (sigma, halfwidth, 1/rate).
  double min_scale() const;

 private:
  KernelSpec() = default;
  KernelFamily family_ = KernelFamily::gaussian;
  int dim_ = 1;
  std::vector<KernelComponent> components_;
};

/// a(z), nonnegative.
double eval_kernel(const KernelSpec& spec, const Coord& z);

/// M_k(a) = int |z|^k a(z) dz for k in 0..3. Closed form where one exists,
/// adaptive Gauss-Kronrod with relative tolerance 1e-10 otherwise.
double moment(const KernelSpec& spec, int k);

/// The four moments M_0..M_3.
std::array<double, 4> moments(const KernelSpec& spec);

enum class MuFamily { constant, exp_trig, separable_trig };

const char* to_string(MuFamily family) noexcept;

enum class Trig { cos, sin };

/// beta * trig(2 pi (<kx, x> + <ky, y>)).
struct ExpTrigTerm {
  double beta = 0.0;
  std::vector<int> kx;
  std::vector<int> ky;
  Trig trig = Trig::cos;
};

/// c_cos cos(2 pi <k, x>) + c_sin sin(2 pi <k, x>).
struct TrigMode {
  std::vector<int> k;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

/// constant + sum of modes; a real trigonometric polynomial on the cell.
struct TrigPolynomial {
  double constant = 1.0;
  std::vector<TrigMode> modes;

  double operator()(std::span<const double> x) const;
};

class MuSpec {
 public:
  static MuSpec constant(int dim, double value = 1.0);
  /// mu = exp(sum_m term_m(x, y)).
  static MuSpec exp_trig(int dim, std::vector<ExpTrigTerm> terms);
  /// mu = f(x) g(y), both factors strictly positive.
  static MuSpec separable(int dim, TrigPolynomial f, TrigPolynomial g);

  MuFamily family() const noexcept { return family_; }
  int dim() const noexcept { return dim_; }
  bool is_constant() const noexcept { return family_ == MuFamily::constant; }
  double constant_value() const noexcept { return value_; }
  const std::vector<ExpTrigTerm>& terms() const noexcept { return terms_; }
  const TrigPolynomial& f() const noexcept { return f_; }
  const TrigPolynomial& g() const noexcept { return g_; }

  double operator()(std::span<const double> x, std::span<const double> y) const;
  double operator()(const Coord& x, const Coord& y) const;

  /// (mu_-, mu_+), cached from construction.
  std::pair<double, double> bounds() const noexcept { return bounds_; }

 private:
  MuSpec() = default;
  MuFamily family_ = MuFamily::constant;
  int dim_ = 1;
  double value_ = 1.0;
  std::vector<ExpTrigTerm> terms_;
  TrigPolynomial f_;
  TrigPolynomial g_;
  std::pair<double, double> bounds_{1.0, 1.0};
};

/// Certified (mu_-, mu_+). exp-trig: exp(-+sum|beta|). separable: per-factor
/// extremes from a dense grid search refined 4x around the extreme nodes.
/// Throws a configuration error when a separable factor is not positive.
std::pair<double, double> mu_bounds(const MuSpec& spec);

/// Lattice shells |n|_inf <= radius enter the periodization sum.
struct TruncationPlan {
  int radius = 0;
  double tail_bound = 0.0;  ///< certified excluded (1 + |z|^3)-weighted mass
  double tolerance = 0.0;   ///< requested tau
};

/// Smallest radius R with int_{|w|_inf > R} (1 + |w|^3) a(w) dw <= tau.
/// Throws a configuration error when R would exceed `radius_cap`.
TruncationPlan select_truncation(const KernelSpec& spec, double tau, int radius_cap = 64);

/// The weighted tail integral used by select_truncation, for inspection.
double truncation_tail(const KernelSpec& spec, int radius);

/// a~(xi, z) truncated to plan.radius shells.
Complex periodized_kernel(const KernelSpec& spec, const Coord& xi, const Coord& z,
                          const TruncationPlan& plan);

/// Multi-index xi-derivative of the periodized kernel, in the form entering
/// d^alpha A(xi):  -(-i)^{|alpha|} sum_n (z + n)^alpha a(z + n) e^{-i<xi, z + n>}.
Complex periodized_kernel_derivative(const KernelSpec& spec, const Coord& xi, const Coord& z,
                                     const TruncationPlan& plan, std::array<int, 2> alpha);

}  // namespace convhom
