#include "convhom/fixtures.hpp"
#include "convhom/problem.hpp"
#include "convhom/rate_certification.hpp"
#include "convhom/threshold_analysis.hpp"
#include "test_helpers.hpp"

using namespace convhom;
using testing::iso;
using testing::vec;

TEST_SUITE("rate_certification") {

TEST_CASE("sweep layout") {
  SweepConfig cfg;
  const auto p1 = sweep_points(cfg, 1, 0.1);
  CHECK(p1.size() == 64 + 16);
  for (const auto& xi : p1) {
    CHECK(xi(0) >= -kPi);
    CHECK(xi(0) < kPi);
  }
  CHECK(p1[64](0) <= 0.25 * cfg.eps.back());
  CHECK(p1.back()(0) == doctest::Approx(0.1));
  const auto p2 = sweep_points(cfg, 2, 0.1);
  CHECK(p2.size() == 16 * 16 + 16);
  for (std::size_t i = 256; i < p2.size(); ++i) CHECK(p2[i].norm() <= 0.1 * (1 + 1e-12));
}

TEST_CASE("fits and the scaled certificate") {
  std::vector<std::pair<double, double>> pts;
  for (double e : {0.25, 0.125, 0.0625, 0.03125}) pts.emplace_back(e, 3.0 / e);
  CHECK(fit_rate(pts).slope == doctest::Approx(-1.0));
  pts.pop_back();
  CHECK(testing::error_kind([&] { fit_rate(pts); }) == ErrorKind::usage);

  const std::vector<double> eps{0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  std::vector<double> good, flat, quadratic;
  for (double e : eps) {
    good.push_back(2.0 / e);
    flat.push_back(1.0);
    quadratic.push_back(5.0);
  }
  const Certificate ok = scaled_certificate(eps, good);
  CHECK(ok.scaled_slope == doctest::Approx(1.0));
  CHECK(ok.pass);
  // E flat means eps^2 E decays with slope 2: outside the window
  CHECK_FALSE(scaled_certificate(eps, flat).pass);
  std::vector<double> stalled;
  for (double e : eps) stalled.push_back(1.0 / (e * e));
  const Certificate st = scaled_certificate(eps, stalled);
  CHECK_FALSE(st.decay_ok);
  CHECK_FALSE(st.pass);
}

TEST_CASE("ablation names") {
  CHECK(parse_ablation("no-drift") == Ablation::no_drift);
  CHECK(parse_ablation("no-q0") == Ablation::no_q0);
  CHECK(parse_ablation("neither") == Ablation::neither);
  CHECK(std::string(to_string(Ablation::no_q0)) == "no-q0");
  CHECK(testing::error_kind([] { parse_ablation("drift"); }) == ErrorKind::usage);
  CHECK_FALSE(options_for(Ablation::neither).drift);
  CHECK_FALSE(options_for(Ablation::neither).weight_q0);
  const Fixture f = make_fixture("gauss_mu1_1d");
  ProblemOptions o = f.options;
  o.n = 16;
  const Problem pb(f.kernel, f.mu, o);
  CHECK(testing::error_kind([&] { check_ablation(pb, Ablation::no_drift); }) == ErrorKind::usage);
}

TEST_CASE("fibre error for constant mu equals the per-mode scalar difference") {
  const Fixture f = make_fixture("shifted_gauss_mu1_1d");
  ProblemOptions o = f.options;
  o.n = 32;
  const Problem pb(f.kernel, f.mu, o);
  const CellGrid& g = pb.grid();
  for (double xi : {0.05, 1.3}) {
    for (double eps : {0.25, 0.0625}) {
      const FibreMatrix fm = pb.assembler().fibre(vec({xi}));
      double ref = 0.0;
      for (Index m = 0; m < g.size(); ++m) {
        const double k = kTwoPi * g.frequency(m)[0] + xi;
        const Complex exact = 1.0 / (f.kernel.fourier(vec({0.0})) - f.kernel.fourier(vec({k})) + eps * eps);
        const Complex model = 1.0 / Complex(0.09 * k * k + eps * eps, 0.3 * k);
        ref = std::max(ref, std::abs(exact - model));
      }
      CHECK(fibre_error(pb, fm, eps) == doctest::Approx(ref).epsilon(1e-7));
    }
  }
}

TEST_CASE("sweep is independent of the thread count") {
  const Fixture f = make_fixture("skew_separable_1d");
  ProblemOptions o = f.options;
  o.n = 32;
  const Problem pb(f.kernel, f.mu, o);
  const ThresholdContext ctx = analyze_threshold(pb);
  SweepConfig cfg;
  cfg.xi_per_axis = 16;
  cfg.patch_points = 4;
  cfg.eps = {0.25, 0.125, 0.0625, 0.03125};
  const RateReport a = sup_sweep(pb, cfg, ctx.gap.delta0, {Ablation::no_q0});
  cfg.threads = 4;
  const RateReport b = sup_sweep(pb, cfg, ctx.gap.delta0, {Ablation::no_q0});
  CHECK(a.full.E == b.full.E);
  CHECK(a.ablations.at("no-q0").E == b.ablations.at("no-q0").E);
  CHECK(a.errors == b.errors);
}

TEST_CASE("default rate fixture certifies the O(eps) rate") {
  const Fixture f = make_fixture("skew_separable_1d");
  const Problem pb(f.kernel, f.mu, f.options);
  const ThresholdContext ctx = analyze_threshold(pb);
  SweepConfig cfg;
  cfg.threads = 4;
  const RateReport rr = sup_sweep(pb, cfg, ctx.gap.delta0, {Ablation::no_q0});
  CHECK(rr.full.fit.slope >= -1.15);
  CHECK(rr.full.fit.slope <= -0.8);
  CHECK(rr.certificate.pass);
  CHECK(std::isfinite(rr.C_hat));
  // dropping the q0 weight destroys the decay
  CHECK(rr.ablations.at("no-q0").scaled_fit.slope <= 0.2);
}

}
