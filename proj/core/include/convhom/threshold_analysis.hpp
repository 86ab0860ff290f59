#pragma once

// Spectral gap d0, resolvent bound K and radius delta0 at the threshold;
// Riesz projectors F(xi) by trapezoid quadrature on |zeta| = d0/2; the
// threshold remainders F - P and Psi; spectral-route G_j, G_kl via the
// reduced resolvent R1(0); the closed-form constants C1..C5, S.

#include "convhom/effective_model.hpp"
#include "convhom/fibre_operator.hpp"
#include "convhom/fit.hpp"
#include "convhom/stationary_state.hpp"

#include <array>
#include <utility>
#include <vector>

namespace convhom {

struct SpectralGap {
  double lambda0 = 0.0;        ///< |eigenvalue of A(0) nearest 0|
  double d0 = 0.0;
  double K = 0.0;              ///< sampled max of the resolvent norm on the annulus
  int K_samples = 0;
  double delta0 = 0.0;
  double contour_radius = 0.0; ///< d0 / 2
  double a0_norm = 0.0;
  double min_real_part = 0.0;  ///< min Re of the spectrum of A(0)
};

/// Throws a spectral error when no eigenvalue is within 1e-8 |A0| of 0 or d0 < 1e-6.
/// |(A - zeta)^{-1}| by power iteration on an LU factorization.
double resolvent_norm(const CMatrix& A, Complex zeta);

SpectralGap estimate_gap(const RMatrix& A0, double M1, double mu_plus, int angles = 32);

struct RieszProjector {
  CMatrix F;
  CMatrix AF;
  int nodes = 0;
  double defect = 0.0;  ///< |F^2 - F|
};

/// F = -(1/2 pi i) \oint (A - zeta)^{-1} d zeta on |zeta| = d0/2, nodes doubled from
/// `initial_nodes` until |F^2 - F| <= tol; contour error past `max_nodes`.
RieszProjector riesz_projector(const CMatrix& A, const SpectralGap& gap, int initial_nodes = 64,
                               int max_nodes = 4096, double tol = 1e-8);

/// Number of singular values above `threshold`.
int numerical_rank(const CMatrix& m, double threshold = 1e-6);

struct SpectralG {
  std::vector<CMatrix> Gj;
  std::vector<std::vector<CMatrix>> Gkl;
  RMatrix R1;
  double R1_residual = 0.0;  ///< |R1 A0 Q - Q|
  double R1_norm = 0.0;
  double Gj_defect = 0.0;    ///< max_j |G_j - i alpha_j P|
  RMatrix g;                 ///< trace(P G_kl P)
  RMatrix PGQ_norm;          ///< diagnostics, no threshold
  RMatrix QGP_norm;
};

SpectralG spectral_G(const CellGrid& grid, const DerivativeStack& derivs, const ProjectorSet& proj,
                     const RMatrix& A0, const BorderedSolver& solver, const RVector& alpha);

/// [G]_2(xi) = 1/2 sum G_kl xi_k xi_l.
CMatrix second_order_term(const SpectralG& sg, const Coord& xi);

struct Remainders {
  double F_minus_P = 0.0;
  double Psi = 0.0;
  Complex lambda1;
};

Remainders threshold_remainders(const Coord& xi, const RieszProjector& rp, const ProjectorSet& proj,
                                const RVector& alpha, const SpectralG& sg);

struct ConstantsLedger {
  double C1 = 0, C2 = 0, C3 = 0, C4 = 0, S = 0;
  double C5_1 = 0, C5_2 = 0, C5 = 0, C5_tilde = 0;
  double c_star = 0;   ///< mu_- q_- q_+^{-1} C(a)
  double C_theorem = 0;  ///< C~5 + q_+ (mu_- q_- C(a))^{-1/2} / pi
  bool K_sampled = true;
};

ConstantsLedger constants_ledger(const SpectralGap& gap, const std::array<double, 4>& M, double mu_minus,
                                 double mu_plus, double q_minus, double q_plus, double C_a, int d);

/// Closed-form right-hand side of the Xi(xi, eps) bound.
double xi_bound(const ConstantsLedger& ledger, double xi_norm, double eps);

struct ThresholdSample {
  double xi_norm = 0.0;
  double F_minus_P = 0.0;
  double Psi = 0.0;
  Complex lambda1;
  double lambda1_remainder = 0.0;  ///< |lambda1 - i<alpha, xi> - <g0 xi, xi>|
  int rank = 0;
  int nodes = 0;
  double defect = 0.0;
  double commutator = 0.0;  ///< |FA - AF| / |A|
};

struct ThresholdReport {
  Coord direction;
  std::vector<ThresholdSample> samples;
  LogLogFit F_fit;
  LogLogFit Psi_fit;
  LogLogFit lambda_fit;
  bool F_bound_ok = true;        ///< |F - P| <= C1 |xi|
  bool lambda_real_ok = true;    ///< Re lambda1 >= 0.9 mu_- q_- q_+^{-1} C(a) |xi|^2
  bool rank_ok = true;
  bool slopes_ok = false;
};

}  // namespace convhom

namespace convhom {

class Problem;

struct ThresholdContext {
  SpectralGap gap;
  SpectralG spectral;
  ConstantsLedger ledger;
};

ThresholdContext analyze_threshold(const Problem& problem);

/// Samples |xi| log-spaced in [1e-3, delta0] along `direction` (default: a
/// generic unit vector) and fits the remainder slopes.
ThresholdReport run_threshold(const Problem& problem, const ThresholdContext& ctx, int count = 12,
                              Coord direction = Coord());

/// rank F(xi) and the resolvent on the annulus d0/3 <= |zeta| <= 2 d0/3 for
/// every xi with |xi| <= delta0.
struct StabilityCheck {
  int samples = 0;
  int min_rank = 0;
  int max_rank = 0;
  double max_resolvent = 0.0;
  double bound = 0.0;  ///< 3K/2 (1 + slack)
  bool pass = false;
};

StabilityCheck stability_check(const Problem& problem, const ThresholdContext& ctx, const std::vector<Coord>& xis,
                               int angles = 16, double slack = 1e-3);

/// |Xi(xi, eps)| against xi_bound at a set of (xi, eps) pairs, |xi| <= delta0.
struct XiSample {
  double xi_norm = 0.0;
  double eps = 0.0;
  double value = 0.0;
  double bound = 0.0;
};

struct XiCheck {
  std::vector<XiSample> samples;
  double max_ratio = 0.0;  ///< max value / bound
  bool pass = false;
};

XiCheck xi_spot_check(const Problem& problem, const ThresholdContext& ctx, const std::vector<std::pair<Coord, double>>& pairs,
                      double slack = 0.01);

/// The ten default pairs: |xi| in delta0 {0.01, 0.1, 0.3, 0.6, 1} along a generic direction, eps in {1/4, 1/32}.
std::vector<std::pair<Coord, double>> default_xi_pairs(int dim, double delta0);

}  // namespace convhom
