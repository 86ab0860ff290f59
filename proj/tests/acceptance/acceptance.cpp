// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1).

#include "convhom/fibre_operator.hpp"
#include "convhom/fixtures.hpp"
#include "convhom/problem.hpp"
#include "convhom/rate_certification.hpp"
#include "convhom/threshold_analysis.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

using namespace convhom;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Coord vec1(double x) {
  Coord c(1);
  c(0) = x;
  return c;
}

int threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Shared across criteria 6, 7 and 10.
struct RateRun {
  Problem problem;
  ThresholdContext ctx;
  RateReport report;
  double seconds = 0.0;
};

RateRun rate_run(const std::string& fixture, const std::vector<Ablation>& ablations = {}) {
  const auto t0 = Clock::now();
  const Fixture f = make_fixture(fixture);
  Problem pb(f.kernel, f.mu, f.options);
  ThresholdContext ctx = analyze_threshold(pb);
  SweepConfig cfg;
  cfg.threads = threads();
  RateReport rr = sup_sweep(pb, cfg, ctx.gap.delta0, ablations);
  rr.C1 = ctx.ledger.C1;
  rr.C5 = ctx.ledger.C5;
  rr.C_theorem = ctx.ledger.C_theorem;
  return RateRun{std::move(pb), std::move(ctx), std::move(rr), seconds_since(t0)};
}

bool rate_window(const RateReport& rr) {
  return rr.full.fit.slope >= -1.15 && rr.full.fit.slope <= -0.8 && rr.certificate.pass;
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  Fixture f = make_fixture("gauss_mu1_1d");
  f.options.n = 64;
  const Problem pb(f.kernel, f.mu, f.options);
  double worst = 0.0;
  for (double xi : {-3.0, -1.3, 0.0, 0.7, 2.9}) {
    const CMatrix A = pb.assembler().fibre(vec1(xi)).A;
    const CMatrix O = symbol_oracle_mu1(pb.grid(), f.kernel, f.mu, vec1(xi));
    worst = std::max(worst, operator_norm(CMatrix(A - O)) / operator_norm(A));
  }
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << "max rel diff " << worst << " (<= 1e-10), " << t << " s (< 5)";
  return {worst <= 1e-10 && t < 5.0, os.str()};
}

Outcome criterion2() {
  bool ok = true;
  std::ostringstream os;
  double worst_res = 0, worst_int = 0, worst_mu1 = 0, min_q = 1e300;
  for (const auto& name : fixture_names()) {
    const Fixture f = make_fixture(name);
    const Problem pb(f.kernel, f.mu, f.options);
    const double h = pb.grid().weight();
    const double res = std::sqrt(h) * (pb.A0().transpose() * pb.q0()).norm() / pb.A0_norm();
    const double integ = std::abs(h * pb.q0().sum() - 1.0);
    worst_res = std::max(worst_res, res);
    worst_int = std::max(worst_int, integ);
    min_q = std::min(min_q, pb.q0().minCoeff());
    bool fok = res <= 1e-8 && pb.q0().minCoeff() > 0 && integ <= 1e-10;
    if (f.mu.is_constant()) {
      const double dev = (pb.q0().array() - 1.0).abs().maxCoeff();
      worst_mu1 = std::max(worst_mu1, dev);
      fok = fok && dev <= 1e-8;
    }
    if (!fok) os << "[" << name << " fails] ";
    ok = ok && fok;
  }
  os << fixture_names().size() << " fixtures; residual " << worst_res << ", integral " << worst_int << ", min q0 "
     << min_q << ", mu=1 max|q0-1| " << worst_mu1;
  return {ok, os.str()};
}

Outcome criterion3() {
  const Fixture f = make_fixture("shifted_gauss_mu1_1d");
  const Problem pb(f.kernel, f.mu, f.options);
  const double a = pb.model().alpha(0);
  const double g = pb.model().g0(0, 0);
  double v = 0.0;
  for (const RVector& c : pb.correctors().v) v = std::max(v, c.cwiseAbs().maxCoeff());
  std::ostringstream os;
  os.precision(12);
  os << "alpha " << a << ", g0 " << g << ", max|v| " << v;
  return {std::abs(a - 0.3) <= 1e-6 && std::abs(g - 0.09) <= 1e-6 && v <= 1e-8, os.str()};
}

Outcome criterion4() {
  bool ok = true;
  std::ostringstream os;
  for (const char* name : {"exptrig_gauss_1d", "exptrig_gauss_2d"}) {
    const Fixture f = make_fixture(name);
    const Problem pb(f.kernel, f.mu, f.options);
    const BorderedSolver solver(pb.grid(), pb.A0(), pb.q0());
    const SpectralG sg = spectral_G(pb.grid(), pb.derivatives(), pb.projectors(), pb.A0(), solver, pb.model().alpha);
    const double rel = (sg.g - pb.model().g_raw).cwiseAbs().maxCoeff() / pb.model().g_raw.cwiseAbs().maxCoeff();
    ok = ok && rel <= 1e-6;
    os << name << " rel " << rel << "; ";
  }
  return {ok, os.str()};
}

Outcome criterion5() {
  const auto t0 = Clock::now();
  const Fixture f = make_fixture("separable_gauss_1d");
  const Problem pb(f.kernel, f.mu, f.options);
  const ThresholdContext ctx = analyze_threshold(pb);
  const ThresholdReport tr = run_threshold(pb, ctx);
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << "n=" << pb.grid().n() << " |xi| in [" << tr.samples.front().xi_norm << ", " << tr.samples.back().xi_norm
     << "]: slopes F-P " << tr.F_fit.slope << ", Psi " << tr.Psi_fit.slope << ", lambda1 " << tr.lambda_fit.slope
     << "; " << t << " s (< 60)";
  return {tr.slopes_ok && t < 60.0, os.str()};
}

Outcome criterion6(const RateRun& r1, const RateRun& r2) {
  std::ostringstream os;
  const bool ok1 = rate_window(r1.report) && r1.seconds < 120.0;
  const bool ok2 = rate_window(r2.report) && r2.seconds < 900.0;
  os << "1D: slope " << r1.report.full.fit.slope << ", scaled " << r1.report.certificate.scaled_slope << ", last/first "
     << r1.report.certificate.last / r1.report.certificate.first << ", " << r1.seconds << " s (< 120); ";
  os << "2D: slope " << r2.report.full.fit.slope << ", scaled " << r2.report.certificate.scaled_slope << ", last/first "
     << r2.report.certificate.last / r2.report.certificate.first << ", " << r2.seconds << " s (< 900)";
  return {ok1 && ok2, os.str()};
}

Outcome criterion7(const RateRun& r) {
  const XiCheck xc = xi_spot_check(r.problem, r.ctx, default_xi_pairs(r.problem.grid().dim(), r.ctx.gap.delta0));
  std::ostringstream os;
  os << "C_hat " << r.report.C_hat << " vs C1 " << r.report.C1 << " (C_theorem " << r.report.C_theorem
     << "); Xi max ratio " << xc.max_ratio << " over " << xc.samples.size() << " pairs (<= 1.01)";
  return {std::isfinite(r.report.C_hat) && xc.pass && xc.samples.size() == 10, os.str()};
}

Outcome criterion8() {
  bool ok = true;
  std::ostringstream os;
  for (const char* name : {"exptrig_gauss_1d", "separable_gauss_1d", "skew_separable_1d", "shifted_gauss_mu1_1d"}) {
    const Fixture f = make_fixture(name);
    const Problem pb(f.kernel, f.mu, f.options);
    const double c = pb.mu_bounds().first * pb.stationary().q_minus * pb.coercivity().C;
    double worst = 1e300;
    for (int t = 0; t < 20; ++t) {
      const double xi = -kPi + kTwoPi * (t + 0.5) / 20;
      const FibreMatrix fm = pb.assembler().fibre(vec1(xi));
      const CMatrix W = pb.q0().cast<Complex>().asDiagonal() * fm.A;
      const double lmin = hermitian_part_min_eigenvalue(W);
      const double need = std::max(-1e-10 * operator_norm(fm.A), 0.9 * c * xi * xi);
      worst = std::min(worst, lmin / need);
      ok = ok && lmin >= need;
    }
    os << name << " min ratio " << worst << "; ";
  }
  return {ok, os.str()};
}

Outcome criterion9() {
  const RateRun r = rate_run("shifted_gauss_mu1_1d", {Ablation::no_drift});
  const double nd = r.report.ablations.at("no-drift").scaled_fit.slope;
  const bool full_ok = rate_window(r.report);
  std::ostringstream os;
  os << "no-drift scaled slope " << nd << " (<= 0.2); full model slope " << r.report.full.fit.slope << ", scaled "
     << r.report.certificate.scaled_slope << " (needs criterion 6 windows)";
  return {nd <= 0.2 && full_ok, os.str()};
}

Outcome criterion10(const RateRun& r) {
  std::vector<Coord> inside;
  for (const Coord& xi : r.report.points) {
    if (xi.norm() <= r.ctx.gap.delta0) inside.push_back(xi);
  }
  const StabilityCheck sc = stability_check(r.problem, r.ctx, inside, 32);
  std::ostringstream os;
  os << sc.samples << " sweep points with |xi| <= delta0: rank in [" << sc.min_rank << ", " << sc.max_rank
     << "], max annulus resolvent " << sc.max_resolvent << " <= " << sc.bound;
  return {sc.pass, os.str()};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const std::function<Outcome()>& run) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  };

  report(1, criterion1);
  report(2, criterion2);
  report(3, criterion3);
  report(4, criterion4);
  report(5, criterion5);

  std::optional<RateRun> r1, r2;
  std::string rate_error;
  try {
    r1.emplace(rate_run("skew_separable_1d"));
    r2.emplace(rate_run("skew_separable_2d"));
  } catch (const std::exception& e) {
    rate_error = e.what();
  }
  auto need_rate = [&](auto&& f) {
    return [&, f]() -> Outcome {
      if (!r1 || !r2) return {false, "rate sweep failed: " + rate_error};
      return f();
    };
  };
  report(6, need_rate([&] { return criterion6(*r1, *r2); }));
  report(7, need_rate([&] { return criterion7(*r1); }));
  report(8, criterion8);
  report(9, criterion9);
  report(10, need_rate([&] { return criterion10(*r1); }));

  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
