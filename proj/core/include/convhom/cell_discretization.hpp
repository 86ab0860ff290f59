#pragma once

// Uniform midpoint grid on the cell [0,1)^d, the weighted L2 inner product
// h^d sum u_i conj(v_i), the discrete Fourier basis and induced operator norms.

#include "convhom/common.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace convhom {

class CellGrid {
 public:
  /// n even and >= 2, d in {1, 2}.
  CellGrid(int dim, int n);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  Index size() const noexcept { return size_; }
  double spacing() const noexcept { return 1.0 / n_; }
  /// Quadrature weight h^d.
  double weight() const noexcept { return weight_; }

  /// Node (i + 1/2)/n per axis; flat index runs fastest along axis 0.
  Coord node(Index flat) const;
  std::array<int, 2> multi_index(Index flat) const;

  /// Integer frequency of Fourier slot m, entries in {-n/2, ..., n/2 - 1}.
  std::array<int, 2> frequency(Index m) const;

  bool operator==(const CellGrid& other) const noexcept {
    return dim_ == other.dim_ && n_ == other.n_;
  }

 private:
  int dim_;
  int n_;
  Index size_;
  double weight_;
};

struct GridFunction {
  CellGrid grid;
  CVector values;

  GridFunction(CellGrid g, CVector v);
  static GridFunction constant(const CellGrid& g, Complex value);
};

/// h^d sum u_i conj(v_i). Throws a usage error on mismatched grids.
Complex inner_product(const GridFunction& u, const GridFunction& v);
Complex inner_product(const CellGrid& grid, const CVector& u, const CVector& v);
double l2_norm(const CellGrid& grid, const CVector& u);

/// forward(m, j) = h^d exp(-2 pi i <k_m, x_j>), inverse = forward^{-1}.
/// forward is unitary from weighted L2 on nodes to l2 on coefficients.
struct FourierBasis {
  CMatrix forward;
  CMatrix inverse;
};

FourierBasis dft_basis(const CellGrid& grid);

struct NormOptions {
  double rel_tol = 1e-8;
  int max_iter = 3000;
  /// Give up on the iteration when the observed contraction predicts more
  /// than this many further steps.
  int stall_iter = 250;
  std::uint64_t seed = 0x5eedc0deULL;
};

struct NormResult {
  double value = 0.0;
  int iterations = 0;
  bool used_svd = false;
  CVector vector;  ///< approximate top right singular vector (unit l2)
};

/// Operator given only through its action and the action of its adjoint.
struct LinearMap {
  Index size = 0;
  std::function<CVector(const CVector&)> apply;
  std::function<CVector(const CVector&)> apply_adjoint;
};

/// Largest singular value by power iteration on M^*M from a seeded random
/// start (or `start` when given), with a dense SVD fallback on stalls.
NormResult operator_norm_detail(const LinearMap& op, const NormOptions& options = {},
                                const CVector* start = nullptr);

double operator_norm(const CMatrix& m, const NormOptions& options = {});
double operator_norm(const RMatrix& m, const NormOptions& options = {});
double operator_norm(const LinearMap& op, const NormOptions& options = {});

/// Largest singular value by full SVD; used as oracle and fallback.
double operator_norm_svd(const CMatrix& m);

}  // namespace convhom
