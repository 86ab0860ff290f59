#include "convhom/effective_model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace convhom {

namespace {

constexpr const char* kStage = "effective_model";

std::array<int, 2> unit(int j) {
  std::array<int, 2> a{0, 0};
  a[static_cast<std::size_t>(j)] = 1;
  return a;
}

double real_inner(const CellGrid& grid, const RVector& u, const RVector& v) {
  return grid.weight() * u.dot(v);
}

}  // namespace

std::vector<RVector> compute_wj(const FibreAssembler& assembler) {
  std::vector<RVector> w;
  for (int j = 0; j < assembler.grid().dim(); ++j) w.push_back(assembler.row_moment(unit(j)));
  return w;
}

RVector compute_alpha(const CellGrid& grid, const std::vector<RVector>& w, const RVector& q0) {
  RVector alpha(static_cast<Index>(w.size()));
  for (std::size_t j = 0; j < w.size(); ++j) alpha(static_cast<Index>(j)) = real_inner(grid, w[j], q0);
  return alpha;
}

BorderedSolver::BorderedSolver(const CellGrid& grid, const RMatrix& A0, const RVector& q0, double condition_cap)
    : n_(A0.rows()) {
  RMatrix M = RMatrix::Zero(n_ + 1, n_ + 1);
  M.topLeftCorner(n_, n_) = A0;
  M.col(n_).head(n_).setOnes();
  M.row(n_).head(n_) = grid.weight() * q0.transpose();
  lu_.compute(M);
  const double rc = lu_.rcond();
  condition_ = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  // rcond misses exact zero pivots
  const RVector piv = lu_.matrixLU().diagonal().cwiseAbs();
  const double pmin = piv.minCoeff();
  condition_ = std::max(condition_, pmin > 0.0 ? piv.maxCoeff() / pmin : std::numeric_limits<double>::infinity());
  if (!(condition_ <= condition_cap)) {
    std::ostringstream os;
    os << "bordered cell-problem matrix is singular (condition estimate " << condition_ << ")";
    raise(ErrorKind::solver, kStage, os.str());
  }
}

RMatrix BorderedSolver::solve(const RMatrix& rhs) const {
  RMatrix b = RMatrix::Zero(n_ + 1, rhs.cols());
  b.topRows(n_) = rhs;
  const RMatrix x = lu_.solve(b);
  return x.topRows(n_);
}

RVector solve_cell_problem(const BorderedSolver& solver, const RVector& w, double alpha) {
  const RVector rhs = w - RVector::Constant(w.size(), alpha);
  return solver.solve(rhs);
}

SecondOrderFields compute_wkl_wtilde(const FibreAssembler& assembler, const RVector& q0) {
  const int d = assembler.grid().dim();
  SecondOrderFields f;
  f.wkl.assign(static_cast<std::size_t>(d), std::vector<RVector>(static_cast<std::size_t>(d)));
  for (int k = 0; k < d; ++k) {
    for (int l = k; l < d; ++l) {
      std::array<int, 2> a{0, 0};
      a[static_cast<std::size_t>(k)] += 1;
      a[static_cast<std::size_t>(l)] += 1;
      RVector w = assembler.row_moment(a);
      f.wkl[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = w;
      f.wkl[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = std::move(w);
    }
    // (x_k - y_k) = -(y - x)_k for the reversed orientation.
    f.wtilde.push_back(-assembler.adjoint_moment(unit(k), q0));
  }
  return f;
}

CorrectorSet compute_correctors(const FibreAssembler& assembler, const RMatrix& A0, const RVector& q0) {
  const CellGrid& grid = assembler.grid();
  const int d = grid.dim();
  CorrectorSet cs;
  cs.w = compute_wj(assembler);
  cs.alpha = compute_alpha(grid, cs.w, q0);
  const BorderedSolver solver(grid, A0, q0);
  cs.condition = solver.condition();
  for (int j = 0; j < d; ++j) {
    RVector v = solve_cell_problem(solver, cs.w[static_cast<std::size_t>(j)], cs.alpha(j));
    const RVector rhs = cs.w[static_cast<std::size_t>(j)] - RVector::Constant(v.size(), cs.alpha(j));
    cs.constraint_defect = std::max(cs.constraint_defect, std::abs(real_inner(grid, v, q0)));
    cs.residual = std::max(cs.residual, l2_norm(grid, (A0 * v - rhs).cast<Complex>()));
    cs.v.push_back(std::move(v));
  }
  SecondOrderFields f = compute_wkl_wtilde(assembler, q0);
  cs.wkl = std::move(f.wkl);
  cs.wtilde = std::move(f.wtilde);
  return cs;
}

EffectiveModel assemble_g0(const CellGrid& grid, const CorrectorSet& cs, const RVector& q0, double lower_bound) {
  const int d = grid.dim();
  EffectiveModel m;
  m.dim = d;
  m.alpha = cs.alpha;
  m.q0 = q0;
  m.g_raw.resize(d, d);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      const auto K = static_cast<std::size_t>(k);
      const auto L = static_cast<std::size_t>(l);
      m.g_raw(k, l) = real_inner(grid, cs.wkl[K][L], q0) - real_inner(grid, cs.v[K], cs.wtilde[L]) -
                      real_inner(grid, cs.v[L], cs.wtilde[K]);
    }
  }
  m.asymmetry = (m.g_raw - m.g_raw.transpose()).cwiseAbs().maxCoeff();
  m.g0 = 0.25 * (m.g_raw + m.g_raw.transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> es(m.g0, Eigen::EigenvaluesOnly);
  m.min_eigenvalue = es.eigenvalues()(0);
  m.lower_bound = lower_bound;
  m.lower_bound_ok = m.min_eigenvalue >= 0.9 * lower_bound;
  if (!(m.min_eigenvalue > 0.0)) {
    std::ostringstream os;
    os << "effective matrix is not positive definite (min eigenvalue " << m.min_eigenvalue << ")";
    raise(ErrorKind::model, kStage, os.str());
  }
  return m;
}

CVector effective_symbol(const CellGrid& grid, const EffectiveModel& model, const Coord& xi, double eps,
                         const EffectiveOptions& opt) {
  if (!(eps > 0.0)) raise(ErrorKind::usage, kStage, "eps must be positive");
  const int d = grid.dim();
  const Index N = grid.size();
  CVector s(N);
  Coord k(d);
  for (Index m = 0; m < N; ++m) {
    const auto f = grid.frequency(m);
    for (int a = 0; a < d; ++a) k(a) = kTwoPi * f[static_cast<std::size_t>(a)] + xi(a);
    const double quad = k.dot(model.g0 * k);
    const double drift = opt.drift ? model.alpha.dot(k) : 0.0;
    const Complex denom(quad + eps * eps, drift);
    if (std::abs(denom) == 0.0) raise(ErrorKind::numeric, kStage, "zero denominator in effective symbol");
    s(m) = 1.0 / denom;
  }
  return s;
}

CMatrix effective_fibre_resolvent(const CellGrid& grid, const FourierBasis& fb, const EffectiveModel& model,
                                  const Coord& xi, double eps, const EffectiveOptions& opt) {
  const CVector s = effective_symbol(grid, model, xi, eps, opt);
  CMatrix r = fb.inverse * s.asDiagonal() * fb.forward;
  if (opt.weight_q0) r = r * model.q0.cast<Complex>().asDiagonal();
  return r;
}

}  // namespace convhom
