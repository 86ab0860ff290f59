#include "convhom/cell_discretization.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <random>

namespace convhom {

namespace {
constexpr const char* kStage = "cell_discretization";
}

CellGrid::CellGrid(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) raise(ErrorKind::configuration, kStage, "grid.d must be 1 or 2");
  if (n < 2 || n % 2 != 0) raise(ErrorKind::configuration, kStage, "grid.n must be even and >= 2");
  size_ = dim == 1 ? n : static_cast<Index>(n) * n;
  weight_ = std::pow(1.0 / n, dim);
}

Coord CellGrid::node(Index flat) const {
  const auto mi = multi_index(flat);
  Coord x(dim_);
  for (int a = 0; a < dim_; ++a) x(a) = (mi[a] + 0.5) / n_;
  return x;
}

std::array<int, 2> CellGrid::multi_index(Index flat) const {
  return {static_cast<int>(flat % n_), dim_ == 2 ? static_cast<int>(flat / n_) : 0};
}

std::array<int, 2> CellGrid::frequency(Index m) const {
  const auto mi = multi_index(m);
  return {mi[0] - n_ / 2, dim_ == 2 ? mi[1] - n_ / 2 : 0};
}

GridFunction::GridFunction(CellGrid g, CVector v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) raise(ErrorKind::usage, kStage, "grid function size mismatch");
}

GridFunction GridFunction::constant(const CellGrid& g, Complex value) {
  return GridFunction(g, CVector::Constant(g.size(), value));
}

Complex inner_product(const GridFunction& u, const GridFunction& v) {
  if (!(u.grid == v.grid)) raise(ErrorKind::usage, kStage, "inner product of functions on different grids");
  return inner_product(u.grid, u.values, v.values);
}

Complex inner_product(const CellGrid& grid, const CVector& u, const CVector& v) {
  if (u.size() != grid.size() || v.size() != grid.size()) {
    raise(ErrorKind::usage, kStage, "inner product size mismatch");
  }
  // Eigen's dot conjugates the first argument.
  return grid.weight() * v.dot(u);
}

double l2_norm(const CellGrid& grid, const CVector& u) {
  return std::sqrt(grid.weight()) * u.norm();
}

FourierBasis dft_basis(const CellGrid& grid) {
  const Index N = grid.size();
  FourierBasis fb;
  fb.forward.resize(N, N);
  fb.inverse.resize(N, N);
  for (Index m = 0; m < N; ++m) {
    const auto k = grid.frequency(m);
    for (Index j = 0; j < N; ++j) {
      const Coord x = grid.node(j);
      double phase = k[0] * x(0);
      if (grid.dim() == 2) phase += k[1] * x(1);
      const Complex e = std::polar(1.0, kTwoPi * phase);
      fb.forward(m, j) = grid.weight() * std::conj(e);
      fb.inverse(j, m) = e;
    }
  }
  return fb;
}

double operator_norm_svd(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

NormResult operator_norm_detail(const LinearMap& op, const NormOptions& options, const CVector* start) {
  const Index n = op.size;
  NormResult res;
  if (n == 0) return res;

  CVector v;
  if (start != nullptr && start->size() == n && start->norm() > 0.0) {
    v = *start / start->norm();
  } else {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> dist;
    v.resize(n);
    for (Index i = 0; i < n; ++i) v(i) = Complex(dist(rng), dist(rng));
    v.normalize();
  }

  double sigma_prev = 0.0;
  double resid_prev = 0.0;
  double log_ratio = 0.0;  // running mean of log(resid_k / resid_{k-1})
  int ratios = 0;
  const double resid_tol = 10.0 * options.rel_tol;
  for (int it = 1; it <= options.max_iter; ++it) {
    const CVector w = op.apply(v);
    CVector z = op.apply_adjoint(w);
    if (!w.allFinite() || !z.allFinite()) raise(ErrorKind::numeric, kStage, "non-finite entries in power iteration");
    const double rho = w.squaredNorm();  // Rayleigh quotient of M^*M
    const double zn = z.norm();
    res.iterations = it;
    if (zn == 0.0) {
      res.value = 0.0;
      res.vector = v;
      return res;
    }
    const double sigma = std::sqrt(rho);
    const double resid = (z - rho * v).norm() / rho;
    v = z / zn;
    if (std::abs(sigma - sigma_prev) <= options.rel_tol * sigma && resid <= resid_tol) {
      res.value = op.apply(v).norm();
      res.vector = v;
      return res;
    }
    if (it > 2 && resid > 0.0 && resid_prev > 0.0) {
      const double lr = std::log(resid / resid_prev);
      log_ratio = ratios == 0 ? lr : 0.8 * log_ratio + 0.2 * lr;
      ++ratios;
    }
    if (ratios >= 20) {
      if (log_ratio >= 0.0) break;
      const double need = std::log(resid_tol / resid) / log_ratio;
      if (need > options.stall_iter || it + need > options.max_iter) break;
    }
    resid_prev = resid;
    sigma_prev = sigma;
  }

  // Stalled: densify and fall back to a full SVD.
  CMatrix dense(n, n);
  CVector e = CVector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    dense.col(j) = op.apply(e);
    e(j) = 0.0;
  }
  Eigen::BDCSVD<CMatrix> svd(dense, Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) raise(ErrorKind::numeric, kStage, "power iteration stalled and SVD failed");
  res.value = svd.singularValues()(0);
  res.vector = svd.matrixV().col(0);
  res.used_svd = true;
  return res;
}

double operator_norm(const LinearMap& op, const NormOptions& options) {
  return operator_norm_detail(op, options).value;
}

double operator_norm(const CMatrix& m, const NormOptions& options) {
  if (m.rows() != m.cols()) return operator_norm_svd(m);
  LinearMap op{m.rows(), [&m](const CVector& x) { return CVector(m * x); },
               [&m](const CVector& x) { return CVector(m.adjoint() * x); }};
  return operator_norm(op, options);
}

double operator_norm(const RMatrix& m, const NormOptions& options) {
  return operator_norm(CMatrix(m.cast<Complex>()), options);
}

}  // namespace convhom
