#include "convhom/fibre_operator.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace convhom {

namespace {

constexpr const char* kStage = "fibre_operator";

Complex minus_i_power(int k) {
  switch (k % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

// Schur test: |M| <= sqrt(max row abs-sum * max column abs-sum).
double schur_bound(const CMatrix& m) {
  const RMatrix a = m.cwiseAbs();
  return std::sqrt(a.rowwise().sum().maxCoeff() * a.colwise().sum().maxCoeff());
}

void check_norm_bound(const CMatrix& m, double bound, const std::string& what) {
  if (schur_bound(m) <= bound) return;
  const double nrm = operator_norm(m);
  if (nrm > bound) {
    std::ostringstream os;
    os << what << " norm " << nrm << " exceeds bound " << bound;
    raise(ErrorKind::assembly, kStage, os.str());
  }
}

}  // namespace

FibreAssembler::FibreAssembler(const CellGrid& grid, const KernelSpec& kernel, const MuSpec& mu,
                               const TruncationPlan& plan, AssemblyTolerances tol)
    : grid_(grid), kernel_(kernel), mu_(mu), plan_(plan), tol_(tol) {
  const int d = grid.dim();
  if (kernel.dim() != d || mu.dim() != d) {
    raise(ErrorKind::configuration, kStage, "kernel, mu and grid dimensions differ");
  }
  const int n = grid.n();
  const int span = 2 * n - 1;
  diffs_ = d == 1 ? span : static_cast<Index>(span) * span;
  samples_.resize(static_cast<std::size_t>(diffs_));
  const int R = plan.radius;
  const int R1 = d == 2 ? R : 0;
  for (Index flat = 0; flat < diffs_; ++flat) {
    const double delta[2] = {static_cast<double>(flat % span - (n - 1)) / n,
                             d == 2 ? static_cast<double>(flat / span - (n - 1)) / n : 0.0};
    auto& out = samples_[static_cast<std::size_t>(flat)];
    for (int m0 = -R; m0 <= R; ++m0) {
      for (int m1 = -R1; m1 <= R1; ++m1) {
        Sample s{{delta[0] + m0, delta[1] + m1}, 0.0};
        s.a = kernel(std::span<const double>(s.w, static_cast<std::size_t>(d)));
        if (s.a > 0.0) out.push_back(s);
      }
    }
  }

  const Index N = grid.size();
  mu_matrix_.resize(N, N);
  std::vector<Coord> nodes;
  nodes.reserve(static_cast<std::size_t>(N));
  for (Index i = 0; i < N; ++i) nodes.push_back(grid.node(i));
  for (Index i = 0; i < N; ++i) {
    for (Index j = 0; j < N; ++j) mu_matrix_(i, j) = mu(nodes[i], nodes[j]);
  }

  std::vector<double> t0(static_cast<std::size_t>(diffs_), 0.0);
  for (Index f = 0; f < diffs_; ++f) {
    for (const auto& s : samples_[static_cast<std::size_t>(f)]) t0[static_cast<std::size_t>(f)] += s.a;
  }
  potential_ = RVector::Zero(N);
  const double h = grid.weight();
  for (Index i = 0; i < N; ++i) {
    double acc = 0.0;
    for (Index j = 0; j < N; ++j) acc += mu_matrix_(i, j) * t0[static_cast<std::size_t>(diff_index(i, j))];
    potential_(i) = h * acc;
  }

  const auto [mu_lo, mu_hi] = mu.bounds();
  const double mass = kernel.mass();
  const double slack = tol.potential_rel * mu_hi * mass + mu_hi * plan.tail_bound;
  const double pmin = potential_.minCoeff();
  const double pmax = potential_.maxCoeff();
  if (pmin < mu_lo * mass - slack || pmax > mu_hi * mass + slack) {
    std::ostringstream os;
    os << "potential range [" << pmin << ", " << pmax << "] violates [" << mu_lo * mass << ", "
       << mu_hi * mass << "]; grid too coarse for the kernel or truncation too loose";
    raise(ErrorKind::assembly, kStage, os.str());
  }
  if (!(pmin > 0.0)) raise(ErrorKind::assembly, kStage, "potential has a nonpositive node");
}

Index FibreAssembler::diff_index(Index i, Index j) const {
  const auto a = grid_.multi_index(i);
  const auto b = grid_.multi_index(j);
  const int n = grid_.n();
  const Index d0 = a[0] - b[0] + (n - 1);
  if (grid_.dim() == 1) return d0;
  return d0 + static_cast<Index>(2 * n - 1) * (a[1] - b[1] + (n - 1));
}

CMatrix FibreAssembler::B(const Coord& xi) const {
  const int d = grid_.dim();
  if (xi.size() != d) raise(ErrorKind::usage, kStage, "quasimomentum dimension mismatch");
  std::vector<Complex> table(static_cast<std::size_t>(diffs_));
  for (Index f = 0; f < diffs_; ++f) {
    Complex acc = 0.0;
    for (const auto& s : samples_[static_cast<std::size_t>(f)]) {
      double phase = xi(0) * s.w[0];
      if (d == 2) phase += xi(1) * s.w[1];
      acc += s.a * std::polar(1.0, -phase);
    }
    table[static_cast<std::size_t>(f)] = acc;
  }
  const Index N = grid_.size();
  const double h = grid_.weight();
  CMatrix b(N, N);
  for (Index j = 0; j < N; ++j) {
    for (Index i = 0; i < N; ++i) b(i, j) = h * mu_matrix_(i, j) * table[static_cast<std::size_t>(diff_index(i, j))];
  }
  return b;
}

FibreMatrix FibreAssembler::fibre(const Coord& xi, bool check) const {
  FibreMatrix fm;
  fm.xi = xi;
  fm.B = B(xi);
  fm.p = potential_;
  fm.A = -fm.B;
  fm.A.diagonal() += potential_.cast<Complex>();
  if (check) {
    const double bound = mu_.bounds().second * kernel_.mass() * (1.0 + tol_.schur_rel);
    check_norm_bound(fm.B, bound, "B(xi)");
  }
  return fm;
}

std::vector<double> FibreAssembler::moment_table(std::array<int, 2> alpha) const {
  std::vector<double> table(static_cast<std::size_t>(diffs_), 0.0);
  for (Index f = 0; f < diffs_; ++f) {
    double acc = 0.0;
    for (const auto& s : samples_[static_cast<std::size_t>(f)]) {
      double mono = 1.0;
      for (int k = 0; k < alpha[0]; ++k) mono *= s.w[0];
      for (int k = 0; k < alpha[1]; ++k) mono *= s.w[1];
      acc += mono * s.a;
    }
    table[static_cast<std::size_t>(f)] = acc;
  }
  return table;
}

CMatrix FibreAssembler::derivative(std::array<int, 2> alpha) const {
  const int d = grid_.dim();
  if (alpha[0] < 0 || alpha[1] < 0 || (d == 1 && alpha[1] != 0) || alpha[0] + alpha[1] == 0) {
    raise(ErrorKind::usage, kStage, "invalid derivative multi-index");
  }
  const std::vector<double> table = moment_table(alpha);
  const Complex factor = -minus_i_power(alpha[0] + alpha[1]) * grid_.weight();
  const Index N = grid_.size();
  CMatrix m(N, N);
  for (Index j = 0; j < N; ++j) {
    for (Index i = 0; i < N; ++i) m(i, j) = factor * mu_matrix_(i, j) * table[static_cast<std::size_t>(diff_index(i, j))];
  }
  return m;
}

RVector FibreAssembler::row_moment(std::array<int, 2> alpha) const {
  const std::vector<double> table = moment_table(alpha);
  const Index N = grid_.size();
  RVector out(N);
  for (Index i = 0; i < N; ++i) {
    double acc = 0.0;
    for (Index j = 0; j < N; ++j) acc += mu_matrix_(i, j) * table[static_cast<std::size_t>(diff_index(i, j))];
    out(i) = grid_.weight() * acc;
  }
  return out;
}

RVector FibreAssembler::adjoint_moment(std::array<int, 2> alpha, const RVector& q) const {
  const Index N = grid_.size();
  if (q.size() != N) raise(ErrorKind::usage, kStage, "weight size does not match grid");
  const std::vector<double> table = moment_table(alpha);
  RVector out(N);
  for (Index i = 0; i < N; ++i) {
    double acc = 0.0;
    for (Index j = 0; j < N; ++j) acc += mu_matrix_(j, i) * q(j) * table[static_cast<std::size_t>(diff_index(j, i))];
    out(i) = grid_.weight() * acc;
  }
  return out;
}

DerivativeStack FibreAssembler::derivatives() const {
  const int d = grid_.dim();
  const double mu_hi = mu_.bounds().second;
  const double m1 = moment(kernel_, 1);
  const double m2 = moment(kernel_, 2);
  DerivativeStack ds;
  for (int j = 0; j < d; ++j) {
    std::array<int, 2> a{0, 0};
    a[static_cast<std::size_t>(j)] = 1;
    ds.first.push_back(derivative(a));
    check_norm_bound(ds.first.back(), mu_hi * m1 * (1.0 + tol_.moment_rel), "d_j A(0)");
  }
  ds.second.assign(static_cast<std::size_t>(d), std::vector<CMatrix>(static_cast<std::size_t>(d)));
  for (int k = 0; k < d; ++k) {
    for (int l = k; l < d; ++l) {
      std::array<int, 2> a{0, 0};
      a[static_cast<std::size_t>(k)] += 1;
      a[static_cast<std::size_t>(l)] += 1;
      CMatrix m = derivative(a);
      check_norm_bound(m, mu_hi * m2 * (1.0 + tol_.moment_rel), "d_k d_l A(0)");
      ds.second[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = m;
      ds.second[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = std::move(m);
    }
  }
  return ds;
}

RVector assemble_potential(const CellGrid& grid, const KernelSpec& kernel, const MuSpec& mu,
                           const TruncationPlan& plan) {
  return FibreAssembler(grid, kernel, mu, plan).potential();
}

FibreMatrix assemble_fibre(const CellGrid& grid, const KernelSpec& kernel, const MuSpec& mu,
                           const Coord& xi, const TruncationPlan& plan) {
  return FibreAssembler(grid, kernel, mu, plan).fibre(xi);
}

DerivativeStack assemble_derivatives(const CellGrid& grid, const KernelSpec& kernel, const MuSpec& mu,
                                     const TruncationPlan& plan) {
  return FibreAssembler(grid, kernel, mu, plan).derivatives();
}

CMatrix symbol_oracle_mu1(const CellGrid& grid, const KernelSpec& kernel, const MuSpec& mu, const Coord& xi) {
  if (!mu.is_constant()) raise(ErrorKind::usage, kStage, "symbol oracle requires constant mu");
  if (xi.size() != grid.dim() || kernel.dim() != grid.dim()) raise(ErrorKind::usage, kStage, "dimension mismatch");
  const FourierBasis fb = dft_basis(grid);
  const Index N = grid.size();
  const Coord zero = Coord::Zero(grid.dim());
  const Complex a0 = kernel.fourier(zero);
  CVector diag(N);
  Coord k(grid.dim());
  for (Index m = 0; m < N; ++m) {
    const auto f = grid.frequency(m);
    for (int a = 0; a < grid.dim(); ++a) k(a) = kTwoPi * f[static_cast<std::size_t>(a)] + xi(a);
    diag(m) = mu.constant_value() * (a0 - kernel.fourier(k));
  }
  return fb.inverse * diag.asDiagonal() * fb.forward;
}

double hermitian_part_min_eigenvalue(const CMatrix& m) {
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) raise(ErrorKind::numeric, kStage, "Hermitian eigensolver failed");
  return es.eigenvalues()(0);
}

}  // namespace convhom
