#include "convhom/fixtures.hpp"
#include "convhom/problem.hpp"
#include "convhom/threshold_analysis.hpp"
#include "test_helpers.hpp"

using namespace convhom;
using testing::iso;
using testing::vec;

TEST_SUITE("threshold_analysis") {

TEST_CASE("gap of the constant-mu gaussian") {
  const Fixture f = make_fixture("gauss_mu1_1d");
  ProblemOptions o = f.options;
  o.n = 64;
  const Problem pb(f.kernel, f.mu, o);
  const SpectralGap gap = estimate_gap(pb.A0(), pb.moments()[1], 1.0);
  // eigenvalues 1 - exp(-sigma^2 (2 pi k)^2 / 2)
  CHECK(gap.d0 == doctest::Approx(1 - std::exp(-0.5 * 0.09 * 4 * kPi * kPi)).epsilon(1e-10));
  CHECK(gap.lambda0 < 1e-12);
  CHECK(gap.K_samples == 96);
  // normal operator: the resolvent norm is 1 / distance to the spectrum, max 3/d0 at radius d0/3
  CHECK(gap.K == doctest::Approx(3.0 / gap.d0).epsilon(1e-6));
  CHECK(gap.delta0 == doctest::Approx(std::min(kPi / 2, 1.0 / ((gap.d0 * gap.K * gap.K + 3 * gap.K) * pb.moments()[1]))));
}

TEST_CASE("Riesz projector at zero is P and has rank one") {
  const Fixture f = make_fixture("separable_gauss_1d");
  ProblemOptions o = f.options;
  o.n = 48;
  const Problem pb(f.kernel, f.mu, o);
  const ThresholdContext ctx = analyze_threshold(pb);
  const RieszProjector rp = riesz_projector(pb.A0().cast<Complex>(), ctx.gap);
  CHECK((rp.F - pb.projectors().P.cast<Complex>()).norm() < 1e-8);
  CHECK(numerical_rank(rp.F) == 1);
  CHECK(rp.defect <= 1e-8);
  CHECK(rp.AF.norm() < 1e-8);
}

TEST_CASE("threshold eigenvalue of the constant-mu gaussian is exact") {
  const Fixture f = make_fixture("shifted_gauss_mu1_1d");
  ProblemOptions o = f.options;
  o.n = 64;
  const Problem pb(f.kernel, f.mu, o);
  const ThresholdContext ctx = analyze_threshold(pb);
  for (double xi : {0.01, 0.05, 0.1}) {
    if (xi > ctx.gap.delta0) continue;
    const FibreMatrix fm = pb.assembler().fibre(vec({xi}));
    const RieszProjector rp = riesz_projector(fm.A, ctx.gap);
    const Complex lam = (rp.AF).trace();
    CHECK(std::abs(lam - (f.kernel.fourier(vec({0.0})) - f.kernel.fourier(vec({xi})))) < 1e-10);
  }
}

TEST_CASE("two routes to g agree") {
  const Fixture f = make_fixture("exptrig_gauss_1d");
  const Problem pb(f.kernel, f.mu, f.options);
  const BorderedSolver solver(pb.grid(), pb.A0(), pb.q0());
  const SpectralG sg = spectral_G(pb.grid(), pb.derivatives(), pb.projectors(), pb.A0(), solver, pb.model().alpha);
  CHECK(std::abs(sg.g(0, 0) - pb.model().g_raw(0, 0)) <= 1e-6 * std::abs(pb.model().g_raw(0, 0)));
  CHECK(sg.Gj_defect < 1e-8);
  CHECK(sg.R1_residual < 1e-8);
}

TEST_CASE("constants ledger arithmetic") {
  SpectralGap gap;
  gap.d0 = 0.8;
  gap.K = 4.0;
  gap.delta0 = 0.05;
  const std::array<double, 4> M{1.0, 0.2, 0.06, 0.02};
  const double mlo = 0.7, mhi = 1.4, qlo = 0.9, qhi = 1.1, Ca = 0.02;
  const ConstantsLedger c = constants_ledger(gap, M, mlo, mhi, qlo, qhi, Ca, 1);
  const double K = 4.0, d0 = 0.8;
  const double C1 = 0.75 * K * K * d0 * mhi * M[1];
  const double C2 = d0 * d0 / 4 *
                    (1.5 * std::pow(K, 4) * std::pow(mhi * M[1], 3) + K * K * mhi * M[3] / 6 +
                     std::pow(K, 3) * mhi * mhi * M[1] * M[2]);
  const double S = (mhi * M[2] + 6 * std::pow(mhi * M[1], 2) * K) * std::pow(K * d0 / 2, 2);
  const double r = qhi / qlo;
  const double C3 = 1.25 * K * d0 * std::sqrt(r) * C1;
  const double C4 = 0.5 * K * d0 * r * (0.75 * K * d0 * C2 + 0.5 * C1 * S * 1 * (1 + 0.5 * K * d0));
  const double cstar = mlo * qlo / qhi * Ca;
  CHECK(c.C1 == doctest::Approx(C1));
  CHECK(c.C2 == doctest::Approx(C2));
  CHECK(c.S == doctest::Approx(S));
  CHECK(c.C3 == doctest::Approx(C3));
  CHECK(c.C4 == doctest::Approx(C4));
  CHECK(c.c_star == doctest::Approx(cstar));
  const double C51 = std::max(std::sqrt(3 * K) * std::pow(r, 0.25) * std::sqrt(1 + 0.75 * K * d0),
                              std::sqrt(r) * (1 + 0.75 * K * d0) * 2 / std::sqrt(d0));
  const double C52 = C3 / std::sqrt(cstar) + C4 / std::pow(cstar, 1.5);
  CHECK(c.C5 == doctest::Approx(C51 + C52));
  const double C5t = std::max(C51 + C52, std::sqrt(r) / std::sqrt(cstar) / 0.05 * (1 + 0.5 * K * d0));
  CHECK(c.C_theorem == doctest::Approx(C5t + qhi / std::sqrt(mlo * qlo * Ca) / kPi));
  CHECK(xi_bound(c, 0.01, 0.1) ==
        doctest::Approx(C3 * 0.01 / (cstar * 1e-4 + 0.01) + C4 * 1e-6 / std::pow(cstar * 1e-4 + 0.01, 2)));
}

TEST_CASE("threshold slopes, stability and the Xi bound") {
  const Fixture f = make_fixture("separable_gauss_1d");
  ProblemOptions o = f.options;
  o.n = 64;
  const Problem pb(f.kernel, f.mu, o);
  const ThresholdContext ctx = analyze_threshold(pb);
  const ThresholdReport tr = run_threshold(pb, ctx);
  CHECK(tr.samples.size() == 12);
  CHECK(tr.samples.back().xi_norm == doctest::Approx(ctx.gap.delta0));
  CHECK(tr.F_fit.slope >= 0.9);
  CHECK(tr.F_fit.slope <= 1.1);
  CHECK(tr.Psi_fit.slope >= 2.7);
  CHECK(tr.lambda_fit.slope >= 2.7);
  CHECK(tr.rank_ok);
  CHECK(tr.F_bound_ok);
  CHECK(tr.lambda_real_ok);
  for (const auto& s : tr.samples) CHECK(s.commutator < 1e-8);

  const StabilityCheck sc = stability_check(pb, ctx, {vec({0.0}), vec({0.5 * ctx.gap.delta0}), vec({-ctx.gap.delta0})}, 8);
  CHECK(sc.samples == 3);
  CHECK(sc.pass);
  const XiCheck xc = xi_spot_check(pb, ctx, default_xi_pairs(1, ctx.gap.delta0));
  CHECK(xc.samples.size() == 10);
  CHECK(xc.pass);
  CHECK(testing::error_kind([&] { run_threshold(pb, ctx, 3); }) == ErrorKind::usage);
}

}
