#include "convhom/fixtures.hpp"
#include "convhom/problem.hpp"
#include "convhom/stationary_state.hpp"
#include "test_helpers.hpp"

using namespace convhom;
using testing::iso;
using testing::vec;

TEST_SUITE("stationary_state") {

TEST_CASE("constant mu gives the uniform density") {
  const Fixture f = make_fixture("gauss_mu1_1d");
  const Problem pb(f.kernel, f.mu, f.options);
  CHECK((pb.q0().array() - 1.0).abs().maxCoeff() <= 1e-8);
  CHECK((pb.projectors().P - pb.projectors().P0).norm() < 1e-8);
}

TEST_CASE("mu = f(x) gives q0 proportional to 1/f") {
  const Fixture f = make_fixture("skew_separable_1d");
  ProblemOptions o = f.options;
  o.n = 64;
  const Problem pb(f.kernel, f.mu, o);
  const CellGrid& g = pb.grid();
  RVector ref(g.size());
  for (Index i = 0; i < g.size(); ++i) ref(i) = 1.0 / f.mu.f()(std::span<const double>(g.node(i).data(), 1));
  ref /= g.weight() * ref.sum();
  CHECK((pb.q0() - ref).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("stationarity on every built-in fixture") {
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    Fixture f = make_fixture(name);
    if (f.kernel.dim() == 2) f.options.n = 12;
    const Problem pb(f.kernel, f.mu, f.options);
    const CellGrid& g = pb.grid();
    const RVector r = pb.A0().transpose() * pb.q0();
    CHECK(std::sqrt(g.weight()) * r.norm() <= 1e-8 * pb.A0_norm());
    CHECK(pb.q0().minCoeff() > 0);
    CHECK(std::abs(g.weight() * pb.q0().sum() - 1.0) <= 1e-10);
  }
}

TEST_CASE("G is column stochastic and its top eigenpair is isolated") {
  const Fixture f = make_fixture("exptrig_gauss_1d");
  ProblemOptions o = f.options;
  o.n = 32;
  const Problem pb(f.kernel, f.mu, o);
  const RMatrix G = build_G(pb.assembler());
  CHECK((G.transpose() * RVector::Ones(G.rows()) - RVector::Ones(G.rows())).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((G.array() >= 0).all());
  const EigenPair ep = solve_stationary(G, pb.grid());
  CHECK(std::abs(ep.eigenvalue - 1.0) < 1e-10);
  CHECK(ep.gap > 1e-3);
  CHECK(ep.multiplicity_near_one == 1);
}

TEST_CASE("inverse iteration agrees with the dense solver") {
  const Fixture f = make_fixture("separable_gauss_1d");
  ProblemOptions o = f.options;
  o.n = 64;
  const Problem pb(f.kernel, f.mu, o);
  const RMatrix G = build_G(pb.assembler());
  StationaryTolerances t;
  t.dense_limit = 8;
  const EigenPair iter = solve_stationary(G, pb.grid(), t);
  const StationaryDensity sd = derive_q0(pb.grid(), iter, pb.assembler().potential(), pb.A0(), t);
  CHECK(iter.method != solve_stationary(G, pb.grid()).method);
  CHECK((sd.q0 - pb.q0()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(iter.gap > 0);
}

TEST_CASE("projector identities") {
  const Fixture f = make_fixture("separable_gauss_1d");
  ProblemOptions o = f.options;
  o.n = 32;
  const Problem pb(f.kernel, f.mu, o);
  const ProjectorSet& ps = pb.projectors();
  const Index N = pb.grid().size();
  CHECK((ps.P * ps.P - ps.P).norm() < 1e-10);
  CHECK((ps.P + ps.Q - RMatrix::Identity(N, N)).norm() < 1e-14);
  CHECK((ps.P * pb.A0()).norm() < 1e-10 * pb.A0_norm());
  CHECK((pb.A0() * ps.P).norm() < 1e-10 * pb.A0_norm());
  CHECK((ps.P0 * ps.P0 - ps.P0).norm() < 1e-10);
}

TEST_CASE("a sign-changing eigenvector is rejected") {
  const CellGrid g(1, 4);
  EigenPair ep;
  ep.psi = vec({1.0, 0.5, -0.2, 0.7});
  ep.eigenvalue = 1.0;
  ep.gap = 0.5;
  ep.multiplicity_near_one = 1;
  const RVector p = RVector::Ones(4);
  const RMatrix A0 = RMatrix::Zero(4, 4);
  CHECK(testing::error_kind([&] { derive_q0(g, ep, p, A0); }) == ErrorKind::spectral);
}

}
