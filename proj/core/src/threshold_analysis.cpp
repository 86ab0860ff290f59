#include "convhom/threshold_analysis.hpp"

#include "convhom/problem.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>

namespace convhom {

namespace {

constexpr const char* kStage = "threshold_analysis";

Coord default_direction(int d) {
  Coord dir(d);
  if (d == 1) {
    dir(0) = 1.0;
  } else {
    dir << 0.8, 0.6;
  }
  return dir;
}

}  // namespace

double resolvent_norm(const CMatrix& A, Complex zeta) {
  const Index N = A.rows();
  CMatrix M = A;
  M.diagonal().array() -= zeta;
  const Eigen::PartialPivLU<CMatrix> lu(M);
  LinearMap inv{N, [&lu](const CVector& x) { return CVector(lu.solve(x)); },
                [&lu](const CVector& x) {
                  const CMatrix& f = lu.matrixLU();
                  CVector y = f.triangularView<Eigen::Upper>().adjoint().solve(x);
                  f.triangularView<Eigen::UnitLower>().adjoint().solveInPlace(y);
                  return CVector(lu.permutationP().transpose() * y);
                }};
  return operator_norm(inv);
}

SpectralGap estimate_gap(const RMatrix& A0, double M1, double mu_plus, int angles) {
  SpectralGap g;
  g.a0_norm = operator_norm(A0);
  Eigen::EigenSolver<RMatrix> es(A0, false);
  if (es.info() != Eigen::Success) raise(ErrorKind::spectral, kStage, "eigendecomposition of A(0) failed");
  const CVector lam = es.eigenvalues();
  Index i0 = 0;
  lam.cwiseAbs().minCoeff(&i0);
  g.lambda0 = std::abs(lam(i0));
  if (g.lambda0 > 1e-8 * g.a0_norm) {
    std::ostringstream os;
    os << "zero eigenvalue of A(0) not found (closest |lambda| = " << g.lambda0 << ")";
    raise(ErrorKind::spectral, kStage, os.str());
  }
  g.d0 = std::numeric_limits<double>::infinity();
  g.min_real_part = lam.real().minCoeff();
  for (Index k = 0; k < lam.size(); ++k) {
    if (k != i0) g.d0 = std::min(g.d0, std::abs(lam(k)));
  }
  if (!(g.d0 >= 1e-6)) {
    std::ostringstream os;
    os << "spectral gap d0 = " << g.d0 << " below 1e-6";
    raise(ErrorKind::spectral, kStage, os.str());
  }
  g.contour_radius = 0.5 * g.d0;
  const CMatrix Ac = A0.cast<Complex>();
  const double radii[3] = {g.d0 / 3.0, g.d0 / 2.0, 2.0 * g.d0 / 3.0};
  for (double r : radii) {
    for (int t = 0; t < angles; ++t) {
      const Complex zeta = std::polar(r, kTwoPi * (t + 0.5) / angles);
      g.K = std::max(g.K, resolvent_norm(Ac, zeta));
      ++g.K_samples;
    }
  }
  g.delta0 = std::min(kPi / 2.0, 1.0 / ((g.d0 * g.K * g.K + 3.0 * g.K) * M1 * mu_plus));
  return g;
}

RieszProjector riesz_projector(const CMatrix& A, const SpectralGap& gap, int initial_nodes, int max_nodes,
                               double tol) {
  const Index N = A.rows();
  CMatrix S1 = CMatrix::Zero(N, N);  // sum zeta R(zeta)
  CMatrix S2 = CMatrix::Zero(N, N);  // sum zeta^2 R(zeta)
  const CMatrix I = CMatrix::Identity(N, N);
  auto add_node = [&](Complex zeta) {
    CMatrix M = A;
    M.diagonal().array() -= zeta;
    const CMatrix R = Eigen::PartialPivLU<CMatrix>(M).solve(I);
    S1 += zeta * R;
    S2 += (zeta * zeta) * R;
  };
  const double r = gap.contour_radius;
  int M = initial_nodes;
  for (int m = 0; m < M; ++m) add_node(std::polar(r, kTwoPi * m / M));
  RieszProjector rp;
  while (true) {
    rp.F = -S1 / static_cast<double>(M);
    rp.AF = -S2 / static_cast<double>(M);
    rp.nodes = M;
    rp.defect = operator_norm(CMatrix(rp.F * rp.F - rp.F));
    if (rp.defect <= tol) return rp;
    if (2 * M > max_nodes) break;
    // Doubling reuses every existing node; add the interleaved ones.
    for (int m = 0; m < M; ++m) add_node(std::polar(r, kTwoPi * (m + 0.5) / M));
    M *= 2;
  }
  std::ostringstream os;
  os << "projector defect " << rp.defect << " not below " << tol << " with " << M << " nodes";
  raise(ErrorKind::contour, kStage, os.str());
}

int numerical_rank(const CMatrix& m, double threshold) {
  Eigen::BDCSVD<CMatrix> svd(m);
  const RVector s = svd.singularValues();
  return static_cast<int>((s.array() > threshold).count());
}

SpectralG spectral_G(const CellGrid& grid, const DerivativeStack& derivs, const ProjectorSet& proj,
                     const RMatrix& A0, const BorderedSolver& solver, const RVector& alpha) {
  const int d = grid.dim();
  SpectralG sg;
  sg.R1 = proj.Q * solver.solve(proj.Q);
  sg.R1_residual = operator_norm(RMatrix(sg.R1 * A0 * proj.Q - proj.Q));
  sg.R1_norm = operator_norm(sg.R1);
  if (sg.R1_residual > 1e-8 * std::max(1.0, operator_norm(proj.Q))) {
    std::ostringstream os;
    os << "reduced resolvent residual " << sg.R1_residual;
    raise(ErrorKind::solver, kStage, os.str());
  }
  const CMatrix P = proj.P.cast<Complex>();
  const CMatrix R = sg.R1.cast<Complex>();
  for (int j = 0; j < d; ++j) {
    sg.Gj.push_back(P * derivs.first[static_cast<std::size_t>(j)] * P);
    const CMatrix expected = Complex(0.0, alpha(j)) * P;
    sg.Gj_defect = std::max(sg.Gj_defect, operator_norm(CMatrix(sg.Gj.back() - expected)));
  }
  sg.Gkl.assign(static_cast<std::size_t>(d), std::vector<CMatrix>(static_cast<std::size_t>(d)));
  sg.g.resize(d, d);
  sg.PGQ_norm.resize(d, d);
  sg.QGP_norm.resize(d, d);
  const CMatrix Q = proj.Q.cast<Complex>();
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      const CMatrix& Dk = derivs.first[static_cast<std::size_t>(k)];
      const CMatrix& Dl = derivs.first[static_cast<std::size_t>(l)];
      const CMatrix& Dkl = derivs.second[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
      const CMatrix PDkP = P * Dk * P;
      const CMatrix PDlP = P * Dl * P;
      CMatrix G = P * Dkl * P;
      G -= P * Dk * R * Dl * P;
      G -= P * Dl * R * Dk * P;
      G -= PDkP * Dl * R;
      G -= R * Dk * PDlP;
      G -= PDlP * Dk * R;
      G -= R * Dl * PDkP;
      sg.g(k, l) = (P * G * P).trace().real();
      sg.PGQ_norm(k, l) = operator_norm(CMatrix(P * G * Q));
      sg.QGP_norm(k, l) = operator_norm(CMatrix(Q * G * P));
      sg.Gkl[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = std::move(G);
    }
  }
  return sg;
}

CMatrix second_order_term(const SpectralG& sg, const Coord& xi) {
  const auto d = static_cast<int>(sg.Gkl.size());
  CMatrix out = CMatrix::Zero(sg.R1.rows(), sg.R1.cols());
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      out += (0.5 * xi(k) * xi(l)) * sg.Gkl[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
  return out;
}

Remainders threshold_remainders(const Coord& xi, const RieszProjector& rp, const ProjectorSet& proj,
                                const RVector& alpha, const SpectralG& sg) {
  Remainders r;
  const CMatrix P = proj.P.cast<Complex>();
  r.F_minus_P = operator_norm(CMatrix(rp.F - P));
  const CMatrix Psi = rp.AF - Complex(0.0, alpha.dot(xi)) * P - second_order_term(sg, xi);
  r.Psi = operator_norm(Psi);
  r.lambda1 = rp.AF.trace();
  return r;
}

ConstantsLedger constants_ledger(const SpectralGap& gap, const std::array<double, 4>& M, double mu_minus,
                                 double mu_plus, double q_minus, double q_plus, double C_a, int d) {
  const double K = gap.K;
  const double d0 = gap.d0;
  const double M1 = M[1];
  const double M2 = M[2];
  const double M3 = M[3];
  ConstantsLedger c;
  c.C1 = 0.75 * K * K * d0 * mu_plus * M1;
  c.C2 = 0.25 * d0 * d0 *
         (1.5 * std::pow(K, 4) * std::pow(mu_plus, 3) * std::pow(M1, 3) + K * K * mu_plus * M3 / 6.0 +
          std::pow(K, 3) * mu_plus * mu_plus * M1 * M2);
  c.S = (mu_plus * M2 + 6.0 * std::pow(mu_plus * M1, 2) * K) * std::pow(0.5 * K * d0, 2);
  const double qratio_half = std::sqrt(q_plus / q_minus);
  c.C3 = 1.25 * K * d0 * qratio_half * c.C1;
  c.C4 = 0.5 * K * d0 * (q_plus / q_minus) *
         (0.75 * K * d0 * c.C2 + 0.5 * c.C1 * c.S * d * (1.0 + 0.5 * K * d0));
  const double t = 1.0 + 0.75 * K * d0;
  c.C5_1 = std::max(std::sqrt(3.0 * K) * std::pow(q_plus / q_minus, 0.25) * std::sqrt(t),
                    qratio_half * t * 2.0 / std::sqrt(d0));
  c.c_star = mu_minus * q_minus / q_plus * C_a;
  c.C5_2 = c.C3 / std::sqrt(c.c_star) + c.C4 / std::pow(c.c_star, 1.5);
  c.C5 = c.C5_1 + c.C5_2;
  c.C5_tilde = std::max(c.C5, qratio_half / std::sqrt(c.c_star) / gap.delta0 * (1.0 + 0.5 * K * d0));
  c.C_theorem = c.C5_tilde + q_plus / std::sqrt(mu_minus * q_minus * C_a) / kPi;
  return c;
}

double xi_bound(const ConstantsLedger& c, double xi_norm, double eps) {
  const double den = c.c_star * xi_norm * xi_norm + eps * eps;
  return c.C3 * xi_norm / den + c.C4 * std::pow(xi_norm, 3) / (den * den);
}

ThresholdContext analyze_threshold(const Problem& pb) {
  ThresholdContext ctx;
  ctx.gap = estimate_gap(pb.A0(), pb.moments()[1], pb.mu_bounds().second);
  const BorderedSolver solver(pb.grid(), pb.A0(), pb.q0());
  ctx.spectral = spectral_G(pb.grid(), pb.derivatives(), pb.projectors(), pb.A0(), solver, pb.model().alpha);
  const auto& st = pb.stationary();
  ctx.ledger = constants_ledger(ctx.gap, pb.moments(), pb.mu_bounds().first, pb.mu_bounds().second, st.q_minus,
                                st.q_plus, pb.coercivity().C, pb.grid().dim());
  return ctx;
}

ThresholdReport run_threshold(const Problem& pb, const ThresholdContext& ctx, int count, Coord direction) {
  const int d = pb.grid().dim();
  if (count < 4) raise(ErrorKind::usage, kStage, "threshold sample count must be >= 4");
  if (direction.size() == 0) direction = default_direction(d);
  if (direction.size() != d || !(direction.norm() > 0.0)) raise(ErrorKind::usage, kStage, "bad direction");
  direction.normalize();

  ThresholdReport rep;
  rep.direction = direction;
  const double hi = ctx.gap.delta0;
  const double lo = hi > 1e-2 ? 1e-3 : 0.1 * hi;
  const auto& model = pb.model();
  const auto& st = pb.stationary();
  const double c_re = 0.9 * pb.mu_bounds().first * st.q_minus / st.q_plus * pb.coercivity().C;
  std::vector<double> xs, fp, psi, lam;
  for (int i = 0; i < count; ++i) {
    const double r = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    const Coord xi = r * direction;
    const FibreMatrix fm = pb.assembler().fibre(xi);
    const RieszProjector rp = riesz_projector(fm.A, ctx.gap);
    const Remainders rem = threshold_remainders(xi, rp, pb.projectors(), model.alpha, ctx.spectral);
    ThresholdSample s;
    s.xi_norm = r;
    s.F_minus_P = rem.F_minus_P;
    s.Psi = rem.Psi;
    s.lambda1 = rem.lambda1;
    s.lambda1_remainder = std::abs(rem.lambda1 - Complex(xi.dot(model.g0 * xi), model.alpha.dot(xi)));
    s.rank = numerical_rank(rp.F);
    s.nodes = rp.nodes;
    s.defect = rp.defect;
    const double anorm = operator_norm(fm.A);
    s.commutator = operator_norm(CMatrix(rp.F * fm.A - fm.A * rp.F)) / anorm;
    rep.F_bound_ok = rep.F_bound_ok && s.F_minus_P <= ctx.ledger.C1 * r;
    rep.lambda_real_ok = rep.lambda_real_ok && s.lambda1.real() >= c_re * r * r;
    rep.rank_ok = rep.rank_ok && s.rank == 1;
    xs.push_back(r);
    fp.push_back(s.F_minus_P);
    psi.push_back(s.Psi);
    lam.push_back(s.lambda1_remainder);
    rep.samples.push_back(s);
  }
  rep.F_fit = fit_loglog(xs, fp);
  rep.Psi_fit = fit_loglog(xs, psi);
  rep.lambda_fit = fit_loglog(xs, lam);
  rep.slopes_ok = rep.F_fit.slope >= 0.9 && rep.F_fit.slope <= 1.1 && rep.Psi_fit.slope >= 2.7 &&
                  rep.lambda_fit.slope >= 2.7;
  return rep;
}

StabilityCheck stability_check(const Problem& pb, const ThresholdContext& ctx, const std::vector<Coord>& xis,
                               int angles, double slack) {
  StabilityCheck sc;
  sc.bound = 1.5 * ctx.gap.K * (1.0 + slack);
  sc.min_rank = std::numeric_limits<int>::max();
  const double d0 = ctx.gap.d0;
  const double radii[3] = {d0 / 3.0, d0 / 2.0, 2.0 * d0 / 3.0};
  for (const Coord& xi : xis) {
    if (xi.norm() > ctx.gap.delta0) continue;
    const FibreMatrix fm = pb.assembler().fibre(xi);
    const RieszProjector rp = riesz_projector(fm.A, ctx.gap);
    const int rank = numerical_rank(rp.F);
    sc.min_rank = std::min(sc.min_rank, rank);
    sc.max_rank = std::max(sc.max_rank, rank);
    for (double r : radii) {
      for (int t = 0; t < angles; ++t) {
        const Complex zeta = std::polar(r, kTwoPi * (t + 0.25) / angles);
        sc.max_resolvent = std::max(sc.max_resolvent, resolvent_norm(fm.A, zeta));
      }
    }
    ++sc.samples;
  }
  if (sc.samples == 0) sc.min_rank = 0;
  sc.pass = sc.samples > 0 && sc.min_rank == 1 && sc.max_rank == 1 && sc.max_resolvent <= sc.bound;
  return sc;
}

XiCheck xi_spot_check(const Problem& pb, const ThresholdContext& ctx, const std::vector<std::pair<Coord, double>>& pairs,
                      double slack) {
  XiCheck xc;
  xc.pass = true;
  const auto& model = pb.model();
  const CMatrix P = pb.projectors().P.cast<Complex>();
  for (const auto& [xi, eps] : pairs) {
    if (xi.norm() > ctx.gap.delta0) raise(ErrorKind::usage, kStage, "Xi spot check needs |xi| <= delta0");
    const FibreMatrix fm = pb.assembler().fibre(xi);
    const RieszProjector rp = riesz_projector(fm.A, ctx.gap);
    CMatrix M = fm.A;
    M.diagonal().array() += eps * eps;
    const Eigen::PartialPivLU<CMatrix> lu(M);
    const Complex lam(xi.dot(model.g0 * xi) + eps * eps, model.alpha.dot(xi));
    const CMatrix Xi = CMatrix(lu.solve(rp.F)) - P / lam;
    XiSample s;
    s.xi_norm = xi.norm();
    s.eps = eps;
    s.value = operator_norm(Xi);
    s.bound = xi_bound(ctx.ledger, s.xi_norm, eps);
    xc.max_ratio = std::max(xc.max_ratio, s.value / s.bound);
    xc.pass = xc.pass && s.value <= s.bound * (1.0 + slack);
    xc.samples.push_back(s);
  }
  return xc;
}

std::vector<std::pair<Coord, double>> default_xi_pairs(int dim, double delta0) {
  const Coord dir = default_direction(dim).normalized();
  std::vector<std::pair<Coord, double>> out;
  for (double f : {0.01, 0.1, 0.3, 0.6, 1.0}) {
    for (double eps : {0.25, 0.03125}) out.emplace_back(f * delta0 * dir, eps);
  }
  return out;
}

}  // namespace convhom
