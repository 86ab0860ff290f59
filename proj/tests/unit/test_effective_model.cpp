#include "convhom/effective_model.hpp"
#include "convhom/fixtures.hpp"
#include "convhom/problem.hpp"
#include "test_helpers.hpp"

using namespace convhom;
using testing::iso;
using testing::vec;

TEST_SUITE("effective_model") {

TEST_CASE("shifted gaussian with constant mu") {
  const Fixture f = make_fixture("shifted_gauss_mu1_1d");
  const Problem pb(f.kernel, f.mu, f.options);
  const EffectiveModel& m = pb.model();
  CHECK(m.alpha(0) == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(m.g0(0, 0) == doctest::Approx((0.09 + 0.09) / 2).epsilon(1e-6));
  for (const RVector& v : pb.correctors().v) CHECK(v.cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(m.lower_bound_ok);
}

TEST_CASE("anisotropic 2D gaussian with constant mu: g0 = (Sigma + c c^T)/2") {
  RMatrix cov(2, 2);
  cov << 0.04, 0.01, 0.01, 0.03;
  const Coord c = vec({0.1, -0.2});
  const KernelSpec k = KernelSpec::gaussian(c, cov);
  ProblemOptions o;
  o.n = 10;
  const Problem pb(k, MuSpec::constant(2, 2.0), o);
  const RMatrix ref = 2.0 * 0.5 * (cov + c * c.transpose());
  CHECK((pb.model().g0 - ref).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((pb.model().alpha - 2.0 * c).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("mu = f(x): zero drift and harmonic-mean diffusion") {
  const Fixture f = make_fixture("skew_separable_1d");
  const Problem pb(f.kernel, f.mu, f.options);
  const double harmonic = std::sqrt(1.0 - 0.09);  // 1 / mean(1 / (1 + 0.3 sin))
  const double m2 = f.kernel.second_moment_matrix()(0, 0);
  CHECK(std::abs(pb.model().alpha(0)) < 1e-12);
  CHECK(pb.model().g0(0, 0) == doctest::Approx(harmonic * m2 / 2).epsilon(1e-9));
}

TEST_CASE("correctors solve the cell problem") {
  const Fixture f = make_fixture("separable_gauss_1d");
  ProblemOptions o = f.options;
  o.n = 64;
  const Problem pb(f.kernel, f.mu, o);
  const CorrectorSet& cs = pb.correctors();
  const double h = pb.grid().weight();
  for (std::size_t j = 0; j < cs.v.size(); ++j) {
    const RVector rhs = cs.w[j] - RVector::Constant(cs.w[j].size(), cs.alpha(j));
    CHECK((pb.A0() * cs.v[j] - rhs).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(h * cs.v[j].dot(pb.q0())) < 1e-12);
    CHECK(cs.alpha(j) == doctest::Approx(h * cs.w[j].dot(pb.q0())));
  }
  CHECK(pb.model().asymmetry < 1e-12);
}

TEST_CASE("bordered solver rejects a singular system") {
  const CellGrid g(1, 4);
  const RMatrix A0 = RMatrix::Zero(4, 4);
  const RVector q = RVector::Ones(4);
  CHECK(testing::error_kind([&] { BorderedSolver(g, A0, q); }) == ErrorKind::solver);
}

TEST_CASE("a non-positive effective matrix is a model error") {
  const CellGrid g(1, 4);
  CorrectorSet cs;
  cs.alpha = vec({0.0});
  cs.w = {RVector::Zero(4)};
  cs.v = {RVector::Zero(4)};
  cs.wtilde = {RVector::Zero(4)};
  cs.wkl = {{RVector::Constant(4, -1.0)}};
  CHECK(testing::error_kind([&] { assemble_g0(g, cs, RVector::Ones(4), 0.0); }) == ErrorKind::model);
}

TEST_CASE("effective symbol and ablations") {
  const Fixture f = make_fixture("shifted_gauss_mu1_1d");
  ProblemOptions o = f.options;
  o.n = 16;
  const Problem pb(f.kernel, f.mu, o);
  const CellGrid& g = pb.grid();
  const double xi = 0.4, eps = 0.1;
  const CVector s = effective_symbol(g, pb.model(), vec({xi}), eps);
  const CVector s0 = effective_symbol(g, pb.model(), vec({xi}), eps, EffectiveOptions{false, true});
  for (Index m = 0; m < g.size(); ++m) {
    const double k = kTwoPi * g.frequency(m)[0] + xi;
    CHECK(std::abs(s(m) - 1.0 / Complex(0.09 * k * k + eps * eps, 0.3 * k)) < 1e-12);
    CHECK(std::abs(s0(m) - 1.0 / (0.09 * k * k + eps * eps)) < 1e-12);
  }
  const CMatrix R = effective_fibre_resolvent(g, pb.fourier(), pb.model(), vec({xi}), eps);
  // constant mu and q0 = 1: R is diagonal in the Fourier basis
  const CMatrix D = pb.fourier().forward * R * pb.fourier().inverse;
  CHECK((D.diagonal() - s).norm() < 1e-10);
  CHECK((D - CMatrix(D.diagonal().asDiagonal())).norm() < 1e-10);
}

}
