#pragma once

// Fibre-wise resolvent comparison |(A(xi) + eps^2)^{-1} - R_eff(xi, eps)|,
// its sup over a quasimomentum grid, rate fits, the scaled certificate and
// ablations of the drift term and the q0 weight.

#include "convhom/effective_model.hpp"
#include "convhom/fit.hpp"
#include "convhom/problem.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace convhom {

struct SweepConfig {
  int xi_per_axis = 0;   ///< 0 selects 64 in 1D, 16 in 2D
  int patch_points = 16; ///< refinement points with |xi| <= delta0
  std::vector<double> eps = {0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  double norm_tol = 1e-8;
  std::uint64_t seed = 20240611ULL;
  int threads = 1;
};

/// Uniform grid over [-pi, pi)^d followed by the patch near 0.
std::vector<Coord> sweep_points(const SweepConfig& cfg, int dim, double delta0);

enum class Ablation { none, no_drift, no_q0, neither };

const char* to_string(Ablation a) noexcept;
Ablation parse_ablation(const std::string& name);
EffectiveOptions options_for(Ablation a) noexcept;

/// |(A(xi) + eps^2)^{-1} - R_eff(xi, eps)| by power iteration on the
/// difference, with (A + eps^2) factorized densely. `warm` carries a start
/// vector in and the converged singular vector out.
double fibre_error(const Problem& problem, const FibreMatrix& fibre, double eps, const EffectiveOptions& opt = {},
                   CVector* warm = nullptr, const NormOptions& norm = {});

struct RateCurve {
  std::vector<double> E;        ///< sup over xi per eps
  std::vector<double> scaled;   ///< eps^2 E
  std::vector<Index> argmax;    ///< sweep index attaining the sup
  LogLogFit fit;
  LogLogFit scaled_fit;
};

struct Certificate {
  double scaled_slope = 0.0;
  double first = 0.0;
  double last = 0.0;
  bool slope_ok = false;
  bool decay_ok = false;  ///< last < first / 4
  bool pass = false;
};

struct RateReport {
  std::vector<double> eps;
  std::vector<Coord> points;
  std::vector<std::vector<double>> errors;  ///< errors[point][eps]
  RateCurve full;
  std::map<std::string, RateCurve> ablations;
  Certificate certificate;
  double C_hat = 0.0;       ///< max eps E(eps)
  double C_theorem = 0.0;   ///< ledger constant of the operator-norm bound
  double C1 = 0.0;
  double C5 = 0.0;
  double delta0 = 0.0;
};

/// Sup over the sweep points of fibre_error for every eps and every requested
/// ablation. Deterministic regardless of the thread count.
RateReport sup_sweep(const Problem& problem, const SweepConfig& cfg, double delta0,
                     const std::vector<Ablation>& ablations = {});

LogLogFit fit_rate(const std::vector<std::pair<double, double>>& curve);

/// PASS iff slope(eps^2 E) in [0.8, 1.15] and the last value < first / 4.
Certificate scaled_certificate(const std::vector<double>& eps, const std::vector<double>& E);

/// Throws a usage error when the ablation cannot change anything the caller
/// asked to measure (no-drift with alpha == 0).
void check_ablation(const Problem& problem, Ablation a);

}  // namespace convhom
