#include "convhom/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace convhom {

namespace {

CheckResult le(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value, "<=", tol, value <= tol, false, std::move(detail)};
}

CheckResult ge(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value, ">=", tol, value >= tol, false, std::move(detail)};
}

CheckResult skip(std::string name, std::string why) {
  return {std::move(name), 0.0, "-", 0.0, true, true, std::move(why)};
}

// B(xi) entry by entry straight from the periodized kernel.
CMatrix direct_B(const Problem& pb, const Coord& xi) {
  const CellGrid& g = pb.grid();
  const Index N = g.size();
  CMatrix B(N, N);
  for (Index i = 0; i < N; ++i) {
    const Coord xi_i = g.node(i);
    for (Index j = 0; j < N; ++j) {
      const Coord xj = g.node(j);
      B(i, j) = g.weight() * pb.mu()(xi_i, xj) * periodized_kernel(pb.kernel(), xi, Coord(xi_i - xj), pb.plan());
    }
  }
  return B;
}

double golden_fraction(int t) {
  const double phi = 0.6180339887498949;
  const double v = t * phi;
  return v - std::floor(v);
}

}  // namespace

std::vector<Coord> dual_cell_samples(int dim, int count) {
  std::vector<Coord> out;
  for (int t = 0; t < count; ++t) {
    Coord xi(dim);
    xi(0) = -kPi + kTwoPi * (t + 0.5) / count;
    if (dim == 2) xi(1) = -kPi + kTwoPi * golden_fraction(t + 1);
    out.push_back(xi);
  }
  return out;
}

SelfcheckReport run_selfcheck(const Problem& pb, const ThresholdContext& ctx, const RunConfig& cfg) {
  SelfcheckReport rep;
  auto& out = rep.checks;
  const CellGrid& g = pb.grid();
  const Index N = g.size();
  const double h = g.weight();
  const auto [mu_lo, mu_hi] = pb.mu_bounds();
  const double mass = pb.kernel().mass();
  const RVector& q0 = pb.q0();
  const RVector& p = pb.assembler().potential();
  const double a0 = pb.A0_norm();

  out.push_back(le("truncation_tail", pb.plan().tail_bound, cfg.tau, "radius " + std::to_string(pb.plan().radius)));
  out.push_back(le("potential_lower", std::max(0.0, mu_lo * mass - p.minCoeff()) / (mu_lo * mass),
                   cfg.tol("potential_rel")));
  out.push_back(le("potential_upper", std::max(0.0, p.maxCoeff() - mu_hi * mass) / (mu_hi * mass),
                   cfg.tol("potential_rel")));
  out.push_back(le("row_sums_zero", (pb.A0() * RVector::Ones(N)).cwiseAbs().maxCoeff() / a0, cfg.tol("oracle_rel")));

  {
    const std::vector<Coord> xs = dual_cell_samples(g.dim(), 5);
    double worst = 0.0;
    const bool symbol = pb.mu().is_constant();
    for (const Coord& xi : xs) {
      const FibreMatrix fm = pb.assembler().fibre(xi);
      CMatrix ref;
      if (symbol) {
        ref = symbol_oracle_mu1(g, pb.kernel(), pb.mu(), xi);
      } else {
        ref = -direct_B(pb, xi);
        ref.diagonal() += p.cast<Complex>();
      }
      worst = std::max(worst, operator_norm(CMatrix(fm.A - ref)) / operator_norm(fm.A));
    }
    out.push_back(le("fibre_oracle", worst, cfg.tol("oracle_rel"),
                     symbol ? "Fourier symbol, 5 quasimomenta" : "direct periodized sum, 5 quasimomenta"));
  }

  const RVector adj = pb.A0().transpose() * q0;
  out.push_back(le("stationary_residual", std::sqrt(h) * adj.norm() / a0, cfg.tol("stationary_residual")));
  out.push_back(ge("q0_positive", q0.minCoeff(), 0.0, "min q0 must be > 0"));
  out.back().relation = ">";
  out.back().pass = q0.minCoeff() > 0.0;
  out.push_back(le("q0_integral", std::abs(h * q0.sum() - 1.0), cfg.tol("q0_integral")));
  if (pb.mu().is_constant()) {
    out.push_back(le("q0_uniform_for_constant_mu", (q0.array() - 1.0).abs().maxCoeff(), cfg.tol("mu1_q0")));
  } else {
    out.push_back(skip("q0_uniform_for_constant_mu", "mu is not constant"));
  }

  const RMatrix& P = pb.projectors().P;
  out.push_back(le("projector_idempotent", operator_norm(RMatrix(P * P - P)), cfg.tol("projector")));
  out.push_back(le("projector_kernel", (operator_norm(RMatrix(P * pb.A0())) + operator_norm(RMatrix(pb.A0() * P))) / a0,
                   cfg.tol("projector"), "|P A0| + |A0 P| relative to |A0|"));

  const CorrectorSet& cs = pb.correctors();
  double defect = 0.0;
  for (const RVector& v : cs.v) defect = std::max(defect, std::abs(h * v.dot(q0)));
  out.push_back(le("corrector_orthogonality", defect, cfg.tol("corrector_orthogonality")));
  out.push_back(le("corrector_residual", cs.residual, cfg.tol("corrector_residual")));

  const EffectiveModel& m = pb.model();
  const double gscale = std::max(m.g_raw.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  out.push_back(le("two_route_g", (ctx.spectral.g - m.g_raw).cwiseAbs().maxCoeff() / gscale, cfg.tol("two_route_rel")));
  out.push_back(le("drift_projection", ctx.spectral.Gj_defect, cfg.tol("two_route_rel"), "|G_j - i alpha_j P|"));
  out.push_back(ge("g0_lower_bound", m.min_eigenvalue, m.lower_bound, "lambda_min(g0) vs mu_- q_- C(a)"));

  {
    const std::vector<Coord> xs = dual_cell_samples(g.dim(), 20);
    double accretive = std::numeric_limits<double>::infinity();
    double coercive = std::numeric_limits<double>::infinity();
    const double c = pb.mu_bounds().first * pb.stationary().q_minus * pb.coercivity().C;
    for (const Coord& xi : xs) {
      const FibreMatrix fm = pb.assembler().fibre(xi);
      const CMatrix W = q0.cast<Complex>().asDiagonal() * fm.A;
      const double lmin = hermitian_part_min_eigenvalue(W);
      accretive = std::min(accretive, lmin / operator_norm(fm.A));
      coercive = std::min(coercive, lmin / (c * xi.squaredNorm()));
    }
    out.push_back(ge("accretivity", accretive, -cfg.tol("accretive_abs"),
                     "min_xi lambda_min(Re diag(q0) A(xi)) / |A(xi)|, 20 quasimomenta"));
    out.push_back(ge("coercivity", coercive, cfg.tol("coercive_fraction"),
                     "min_xi lambda_min(Re diag(q0) A(xi)) / (mu_- q_- C(a) |xi|^2)"));
  }
  out.push_back(ge("coercivity_plateau", pb.coercivity().plateau_ok ? 1.0 : 0.0, 1.0, "symbol plateau beyond search box"));

  {
    const auto pairs = default_xi_pairs(g.dim(), ctx.gap.delta0);
    std::vector<Coord> xs;
    for (std::size_t i = 0; i < pairs.size(); i += 2) xs.push_back(pairs[i].first);
    const StabilityCheck sc = stability_check(pb, ctx, xs, 8, cfg.tol("annulus_slack"));
    out.push_back(le("riesz_rank", std::max(std::abs(sc.min_rank - 1), std::abs(sc.max_rank - 1)), 0.0,
                     "rank F(xi) = 1 for |xi| <= delta0"));
    out.push_back(le("annulus_resolvent", sc.max_resolvent, sc.bound, "3K/2 (1 + slack)"));
    const XiCheck xc = xi_spot_check(pb, ctx, pairs, cfg.tol("xi_bound_slack"));
    out.push_back(le("xi_bound", xc.max_ratio, 1.0 + cfg.tol("xi_bound_slack"), "max |Xi| / bound over 10 pairs"));
  }

  rep.pass = std::all_of(out.begin(), out.end(), [](const CheckResult& c) { return c.pass; });
  return rep;
}

std::string format_selfcheck(const SelfcheckReport& rep) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %-5s %-24s %-3s %-12s\n", "check", "", "value", "", "tolerance");
  os << line;
  int passed = 0;
  for (const auto& c : rep.checks) {
    if (c.skipped) {
      std::snprintf(line, sizeof line, "%-28s %-5s (%s)\n", c.name.c_str(), "SKIP", c.detail.c_str());
    } else {
      std::snprintf(line, sizeof line, "%-28s %-5s %-24.17g %-3s %-12.6g\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                    c.value, c.relation.c_str(), c.tolerance);
    }
    os << line;
    passed += c.pass ? 1 : 0;
  }
  os << passed << "/" << rep.checks.size() << " checks passed\n";
  return os.str();
}

}  // namespace convhom
