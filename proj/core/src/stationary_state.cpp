#include "convhom/stationary_state.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace convhom {

namespace {

constexpr const char* kStage = "stationary_state";

// Rotate a complex eigenvector to real and fix its sign so the mean is positive.
RVector align_phase(const CVector& v, double sign_tol) {
  Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const Complex phase = v(imax) / std::abs(v(imax));
  const CVector w = v / phase;
  RVector r = w.real();
  if (w.imag().norm() > 1e-8 * r.norm()) {
    raise(ErrorKind::spectral, kStage, "eigenvector is not real after phase alignment");
  }
  if (r.sum() < 0.0) r = -r;
  if (r.minCoeff() < -sign_tol * r.cwiseAbs().maxCoeff()) {
    raise(ErrorKind::spectral, kStage, "positivity: stationary eigenvector changes sign");
  }
  return r;
}

EigenPair dense_solve(const RMatrix& G, const StationaryTolerances& tol) {
  Eigen::EigenSolver<RMatrix> es(G, true);
  if (es.info() != Eigen::Success) raise(ErrorKind::spectral, kStage, "eigendecomposition of G failed");
  const CVector lam = es.eigenvalues();
  Index best = 0;
  (lam.array() - 1.0).abs().minCoeff(&best);
  EigenPair out;
  out.method = "dense";
  out.eigenvalue = lam(best).real();
  out.eigenvalue_error = std::abs(lam(best) - 1.0);
  double gap = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < lam.size(); ++k) {
    if (k != best) gap = std::min(gap, std::abs(lam(k) - 1.0));
  }
  out.gap = gap;
  int count = 0;
  for (Index k = 0; k < lam.size(); ++k) {
    if (std::abs(lam(k) - 1.0) < 0.5 * gap) ++count;
  }
  out.multiplicity_near_one = count;
  out.psi = align_phase(es.eigenvectors().col(best), tol.sign);
  return out;
}

EigenPair inverse_iteration(const RMatrix& G, const CellGrid& grid, const StationaryTolerances& tol) {
  const Index N = G.rows();
  const double shift = 1.0 + 1e-3;
  Eigen::PartialPivLU<RMatrix> lu(G - shift * RMatrix::Identity(N, N));
  RVector x = RVector::Ones(N);
  double lam = 0.0;
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    RVector y = lu.solve(x);
    y /= y.norm();
    if (y.sum() < 0.0) y = -y;
    const double change = (y - x / x.norm()).norm();
    x = y;
    lam = x.dot(G * x);
    if (change < 1e-13) {
      converged = true;
      break;
    }
  }
  if (!converged) raise(ErrorKind::spectral, kStage, "inverse iteration did not converge");
  EigenPair out;
  out.method = "inverse_iteration";
  out.eigenvalue = lam;
  out.eigenvalue_error = (G * x - x).norm() / x.norm();
  out.psi = x;
  if (x.minCoeff() < -tol.sign * x.cwiseAbs().maxCoeff()) {
    raise(ErrorKind::spectral, kStage, "positivity: stationary eigenvector changes sign");
  }
  // The left eigenvector at 1 is the constant; deflate and bound the rest of
  // the spectrum by the spectral radius of the deflated operator.
  const double h = grid.weight();
  const RVector ones = RVector::Ones(N);
  const double c = h * ones.dot(x);
  LinearMap defl{N,
                 [&](const CVector& u) {
                   const CVector gu = G.cast<Complex>() * u;
                   return CVector(gu - x.cast<Complex>() * (h * u.sum() / c));
                 },
                 [&](const CVector& u) {
                   const CVector gu = G.transpose().cast<Complex>() * u;
                   return CVector(gu - ones.cast<Complex>() * (h * x.cast<Complex>().dot(u) / c));
                 }};
  // |lambda| <= |G - psi 1^T| for every remaining eigenvalue, and |lambda| <= 1.
  const double rho = std::min(1.0, operator_norm(defl));
  out.gap = std::max(0.0, 1.0 - rho);
  out.multiplicity_near_one = 1;
  return out;
}

}  // namespace

RMatrix build_G(const FibreAssembler& assembler) {
  const RVector& p = assembler.potential();
  if (!(p.minCoeff() > 0.0)) raise(ErrorKind::assembly, kStage, "potential has a nonpositive node");
  const RMatrix B0 = assembler.B(Coord::Zero(assembler.grid().dim())).real();
  RMatrix G = B0.transpose() * p.cwiseInverse().asDiagonal();
  const RVector ones = RVector::Ones(G.rows());
  const double err = l2_norm(assembler.grid(), (G.transpose() * ones - ones).cast<Complex>());
  if (err > 1e-10) {
    std::ostringstream os;
    os << "adjoint identity G^* 1 = 1 violated by " << err;
    raise(ErrorKind::assembly, kStage, os.str());
  }
  return G;
}

EigenPair solve_stationary(const RMatrix& G, const CellGrid& grid, const StationaryTolerances& tol) {
  EigenPair eig = G.rows() <= tol.dense_limit ? dense_solve(G, tol) : inverse_iteration(G, grid, tol);
  if (eig.eigenvalue_error > tol.eigenvalue) {
    std::ostringstream os;
    os << "no eigenvalue within " << tol.eigenvalue << " of 1 (closest at distance " << eig.eigenvalue_error << ")";
    raise(ErrorKind::spectral, kStage, os.str());
  }
  if (!(eig.gap > tol.gap_min)) {
    std::ostringstream os;
    os << "eigenvalue 1 of G is not isolated: gap " << eig.gap;
    raise(ErrorKind::spectral, kStage, os.str());
  }
  eig.psi /= grid.weight() * eig.psi.sum();
  if (!(eig.psi.minCoeff() > 0.0)) raise(ErrorKind::spectral, kStage, "positivity: psi0 is not strictly positive");
  return eig;
}

StationaryDensity derive_q0(const CellGrid& grid, const EigenPair& eig, const RVector& p, const RMatrix& A0,
                            const StationaryTolerances& tol) {
  StationaryDensity st;
  st.psi0 = eig.psi;
  st.gap = eig.gap;
  st.eigenvalue_error = eig.eigenvalue_error;
  st.method = eig.method;
  RVector q = eig.psi.cwiseQuotient(p);
  q /= grid.weight() * q.sum();
  st.q0 = q;
  st.q_minus = q.minCoeff();
  st.q_plus = q.maxCoeff();
  st.psi_minus = eig.psi.minCoeff();
  st.psi_plus = eig.psi.maxCoeff();
  st.integral_error = std::abs(grid.weight() * q.sum() - 1.0);
  const double a_norm = operator_norm(A0);
  st.residual = l2_norm(grid, (A0.transpose() * q).cast<Complex>()) / a_norm;
  if (!(st.q_minus > 0.0)) raise(ErrorKind::spectral, kStage, "q0 is not strictly positive");
  if (st.residual > tol.residual) {
    std::ostringstream os;
    os << "stationarity residual |A(0)^* q0|/|A(0)| = " << st.residual << " exceeds " << tol.residual;
    raise(ErrorKind::spectral, kStage, os.str());
  }
  return st;
}

ProjectorSet build_projectors(const CellGrid& grid, const RVector& q0) {
  const Index N = grid.size();
  if (q0.size() != N) raise(ErrorKind::usage, kStage, "q0 size does not match grid");
  const double h = grid.weight();
  const RVector ones = RVector::Ones(N);
  ProjectorSet ps;
  ps.P = h * ones * q0.transpose();
  ps.P0 = h * ones * ones.transpose();
  ps.Q = RMatrix::Identity(N, N) - ps.P;
  const double defect = std::max({operator_norm(RMatrix(ps.P * ps.P - ps.P)),
                                  operator_norm(RMatrix(ps.Q * ps.Q - ps.Q)),
                                  operator_norm(RMatrix(ps.P * ps.Q))});
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "projector idempotence defect " << defect;
    raise(ErrorKind::numeric, kStage, os.str());
  }
  return ps;
}

StationaryDensity compute_stationary(const FibreAssembler& assembler, const StationaryTolerances& tol) {
  const RMatrix G = build_G(assembler);
  const EigenPair eig = solve_stationary(G, assembler.grid(), tol);
  const RMatrix A0 = assembler.fibre(Coord::Zero(assembler.grid().dim()), false).A.real();
  return derive_q0(assembler.grid(), eig, assembler.potential(), A0, tol);
}

}  // namespace convhom
