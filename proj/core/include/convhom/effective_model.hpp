#pragma once

// Effective drift alpha, correctors v_l from the bordered cell problem,
// the fields w_j, w_kl, w~_k, the effective matrix g0 and the effective
// fibre resolvent in the discrete Fourier basis.

#include "convhom/fibre_operator.hpp"
#include "convhom/stationary_state.hpp"

#include <vector>

namespace convhom {

struct CorrectorSet {
  std::vector<RVector> w;                 ///< w_j
  RVector alpha;                          ///< alpha_j = (w_j, q0)
  std::vector<RVector> v;                 ///< correctors
  std::vector<std::vector<RVector>> wkl;  ///< w_kl = w_lk
  std::vector<RVector> wtilde;            ///< w~_k
  double constraint_defect = 0.0;         ///< max_j |(v_j, q0)|
  double residual = 0.0;                  ///< max_j |A0 v_j - (w_j - alpha_j)|
  double condition = 0.0;                 ///< condition estimate of the bordered system
};

struct EffectiveModel {
  int dim = 1;
  RVector alpha;
  RMatrix g0;         ///< symmetrized, entries g_kl / 2
  RMatrix g_raw;      ///< g_kl before symmetrization
  RVector q0;
  double asymmetry = 0.0;    ///< max |g_kl - g_lk|
  double lower_bound = 0.0;  ///< mu_- q_- C(a)
  double min_eigenvalue = 0.0;
  bool lower_bound_ok = false;
};

/// w_j(x) = int (x_j - y_j) a(x - y) mu(x, y) dy on the grid.
std::vector<RVector> compute_wj(const FibreAssembler& assembler);

RVector compute_alpha(const CellGrid& grid, const std::vector<RVector>& w, const RVector& q0);

/// Bordered factorization of [[A0, 1], [h q0^T, 0]], reused for many right sides.
class BorderedSolver {
 public:
  BorderedSolver(const CellGrid& grid, const RMatrix& A0, const RVector& q0, double condition_cap = 1e12);
  /// Solves A0 X = rhs with (X, q0) = 0 columnwise; rhs must lie in Ran Q.
  RMatrix solve(const RMatrix& rhs) const;
  double condition() const noexcept { return condition_; }

 private:
  Index n_;
  Eigen::PartialPivLU<RMatrix> lu_;
  double condition_ = 0.0;
};

RVector solve_cell_problem(const BorderedSolver& solver, const RVector& w, double alpha);

struct SecondOrderFields {
  std::vector<std::vector<RVector>> wkl;
  std::vector<RVector> wtilde;
};

SecondOrderFields compute_wkl_wtilde(const FibreAssembler& assembler, const RVector& q0);

/// g_kl = (w_kl, q0) - (v_k, w~_l) - (v_l, w~_k); g0 = (g + g^T)/4.
EffectiveModel assemble_g0(const CellGrid& grid, const CorrectorSet& correctors, const RVector& q0,
                           double lower_bound);

/// Full pipeline from an assembler and its stationary density.
CorrectorSet compute_correctors(const FibreAssembler& assembler, const RMatrix& A0, const RVector& q0);

struct EffectiveOptions {
  bool drift = true;       ///< keep i<alpha, k>
  bool weight_q0 = true;   ///< keep the diag(q0) factor
};

/// Diagonal symbol (<g0 k, k> + i<alpha, k> + eps^2)^{-1} over the grid frequencies k = 2 pi n + xi.
CVector effective_symbol(const CellGrid& grid, const EffectiveModel& model, const Coord& xi, double eps,
                         const EffectiveOptions& opt = {});

/// F^{-1} diag(symbol) F diag(q0).
CMatrix effective_fibre_resolvent(const CellGrid& grid, const FourierBasis& fb, const EffectiveModel& model,
                                  const Coord& xi, double eps, const EffectiveOptions& opt = {});

}  // namespace convhom
