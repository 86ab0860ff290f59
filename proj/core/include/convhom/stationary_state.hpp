#pragma once

// Stationary density q0 of the adjoint fibre operator at xi = 0, obtained
// from the positive eigenfunction of G = B(0)^* diag(1/p), and the
// projectors P = (., q0) 1, P0 = (., 1) 1, Q = I - P.

#include "convhom/cell_discretization.hpp"
#include "convhom/fibre_operator.hpp"

#include <string>

namespace convhom {

struct StationaryTolerances {
  double eigenvalue = 1e-8;   ///< |lambda - 1|
  double gap_min = 1e-6;      ///< isolation of eigenvalue 1
  double sign = 1e-10;        ///< allowed negative excursion of psi0 relative to max
  double residual = 1e-8;     ///< |A(0)^* q0| relative to |A(0)|
  Index dense_limit = 4096;   ///< dense eigendecomposition up to this size
};

struct EigenPair {
  RVector psi;           ///< positive, int psi = 1
  double eigenvalue = 0; ///< computed eigenvalue nearest 1 (real part)
  double eigenvalue_error = 0;
  double gap = 0;        ///< distance from 1 to the rest of the spectrum (lower bound for inverse iteration)
  int multiplicity_near_one = 1;
  std::string method;
};

struct StationaryDensity {
  RVector psi0;
  RVector q0;
  double q_minus = 0, q_plus = 0;
  double psi_minus = 0, psi_plus = 0;
  double gap = 0;
  double eigenvalue_error = 0;
  double integral_error = 0;  ///< |int q0 - 1|
  double residual = 0;        ///< |A(0)^* q0| / |A(0)|
  std::string method;
};

struct ProjectorSet {
  RMatrix P;
  RMatrix P0;
  RMatrix Q;
};

/// G = B(0)^T diag(1/p). Checks G^* 1 = 1 to 1e-10.
RMatrix build_G(const FibreAssembler& assembler);

EigenPair solve_stationary(const RMatrix& G, const CellGrid& grid, const StationaryTolerances& tol = {});

StationaryDensity derive_q0(const CellGrid& grid, const EigenPair& eig, const RVector& p, const RMatrix& A0,
                            const StationaryTolerances& tol = {});

ProjectorSet build_projectors(const CellGrid& grid, const RVector& q0);

/// build_G + solve_stationary + derive_q0.
StationaryDensity compute_stationary(const FibreAssembler& assembler, const StationaryTolerances& tol = {});

}  // namespace convhom
