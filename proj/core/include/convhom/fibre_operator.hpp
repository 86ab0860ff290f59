#pragma once

// Fibre operators A(xi) = diag(p) - B(xi) on the cell grid, their analytic
// xi-derivatives at 0, the mu == const Fourier-symbol oracle and the
// coercivity constant C(a).

#include "convhom/cell_discretization.hpp"
#include "convhom/kernel_model.hpp"

#include <array>
#include <vector>

namespace convhom {

struct FibreMatrix {
  Coord xi;
  CMatrix A;
  CMatrix B;
  RVector p;
};

/// d first derivatives and d x d second derivatives of A at xi = 0.
struct DerivativeStack {
  std::vector<CMatrix> first;                ///< first[j] = d_j A(0)
  std::vector<std::vector<CMatrix>> second;  ///< second[k][l] = d_k d_l A(0)
};

struct AssemblyTolerances {
  double potential_rel = 1e-8;  ///< slack on mu_- |a|_1 <= p <= mu_+ |a|_1
  double schur_rel = 1e-8;      ///< slack on |B| <= mu_+ |a|_1
  double moment_rel = 1e-6;     ///< slack on derivative norm bounds
};

/// Precomputes lattice samples of a per grid difference so each fibre costs
/// O((2n-1)^d (2R+1)^d + N^2).
class FibreAssembler {
 public:
  FibreAssembler(const CellGrid& grid, const KernelSpec& kernel, const MuSpec& mu,
                 const TruncationPlan& plan, AssemblyTolerances tol = {});

  const CellGrid& grid() const noexcept { return grid_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  const MuSpec& mu() const noexcept { return mu_; }
  const TruncationPlan& plan() const noexcept { return plan_; }
  const AssemblyTolerances& tolerances() const noexcept { return tol_; }

  /// mu(x_i, x_j).
  const RMatrix& mu_matrix() const noexcept { return mu_matrix_; }
  /// p(x_i), the row sums of B(0); bound-checked at construction.
  const RVector& potential() const noexcept { return potential_; }

  CMatrix B(const Coord& xi) const;
  /// A(xi); Schur bound checked unless check == false.
  FibreMatrix fibre(const Coord& xi, bool check = true) const;
  /// d^alpha A(0) for a multi-index with |alpha| >= 1.
  CMatrix derivative(std::array<int, 2> alpha) const;
  DerivativeStack derivatives() const;

  /// sum_j h mu(x_i, x_j) T_alpha(x_i - x_j), T_alpha(z) = sum_m (z + m)^alpha a(z + m).
  RVector row_moment(std::array<int, 2> alpha) const;
  /// sum_j h mu(x_j, x_i) q(x_j) T_alpha(x_j - x_i).
  RVector adjoint_moment(std::array<int, 2> alpha, const RVector& q) const;

 private:
  struct Sample {
    double w[2];
    double a;
  };
  Index diff_index(Index i, Index j) const;
  std::vector<double> moment_table(std::array<int, 2> alpha) const;

  CellGrid grid_;
  KernelSpec kernel_;
  MuSpec mu_;
  TruncationPlan plan_;
  AssemblyTolerances tol_;
  Index diffs_ = 0;
  std::vector<std::vector<Sample>> samples_;
  RMatrix mu_matrix_;
  RVector potential_;
};

RVector assemble_potential(const CellGrid& grid, const KernelSpec& kernel, const MuSpec& mu,
                           const TruncationPlan& plan);
FibreMatrix assemble_fibre(const CellGrid& grid, const KernelSpec& kernel, const MuSpec& mu,
                           const Coord& xi, const TruncationPlan& plan);
DerivativeStack assemble_derivatives(const CellGrid& grid, const KernelSpec& kernel, const MuSpec& mu,
                                     const TruncationPlan& plan);

/// mu_c * F^{-1} diag(a^(0) - a^(2 pi k + xi)) F for constant mu = mu_c.
/// Throws a usage error for non-constant mu.
CMatrix symbol_oracle_mu1(const CellGrid& grid, const KernelSpec& kernel, const MuSpec& mu, const Coord& xi);

/// A^(y) = int (1 - cos<y, z>) a(z) dz.
double symbol_A_hat(const KernelSpec& kernel, const Coord& y);

/// E(xi) = int a(z) |z|^2 |Phi(<xi, z>) - 1/2| dz, Phi(l) = (1 - cos l)/l^2.
double coercivity_energy(const KernelSpec& kernel, const Coord& xi);

struct CoercivityEstimate {
  double calM = 0.0;        ///< min over unit theta of int <theta, z>^2 a
  double r = 0.0;           ///< r(a), largest dyadic radius passing E <= calM/4
  double C_r = 0.0;         ///< min of A^ over |y| >= r(a)
  double C_pi = 0.0;        ///< min of A^ over |y| >= pi
  double C = 0.0;           ///< min{calM/4, C_r/(pi^2 d), C_pi/(pi^2 d)}
  double search_radius = 0.0;
  double plateau_min = 0.0;  ///< min of A^ on the ring beyond the search box
  double edge_deviation = 0.0;  ///< |A^ - |a|_1| / |a|_1 at the search-box edge
  bool plateau_ok = false;
};

CoercivityEstimate coercivity_constant(const KernelSpec& kernel);

/// Smallest eigenvalue of the Hermitian part (M + M^*)/2.
double hermitian_part_min_eigenvalue(const CMatrix& m);

}  // namespace convhom
