#include "convhom/cell_discretization.hpp"
#include "test_helpers.hpp"

#include <Eigen/SVD>

#include <random>

using namespace convhom;

TEST_SUITE("cell_discretization") {

TEST_CASE("grid layout") {
  const CellGrid g(2, 4);
  CHECK(g.size() == 16);
  CHECK(g.weight() == doctest::Approx(1.0 / 16));
  CHECK(g.node(0)(0) == doctest::Approx(0.125));
  CHECK(g.node(1)(0) == doctest::Approx(0.375));
  CHECK(g.node(4)(1) == doctest::Approx(0.375));
  CHECK(g.multi_index(6)[0] == 2);
  CHECK(g.multi_index(6)[1] == 1);
  for (Index m = 0; m < g.size(); ++m) {
    for (int a = 0; a < 2; ++a) {
      CHECK(g.frequency(m)[a] >= -2);
      CHECK(g.frequency(m)[a] <= 1);
    }
  }
  CHECK(testing::error_kind([] { CellGrid(1, 7); }) == ErrorKind::configuration);
  CHECK(testing::error_kind([] { CellGrid(3, 8); }) == ErrorKind::configuration);
}

TEST_CASE("inner products") {
  const CellGrid g(1, 16);
  const auto one = GridFunction::constant(g, 1.0);
  CHECK(std::abs(inner_product(one, one) - 1.0) < 1e-14);
  const CellGrid g2(1, 8);
  CHECK(testing::error_kind([&] { inner_product(one, GridFunction::constant(g2, 1.0)); }) == ErrorKind::usage);
  CVector s(16);
  for (Index i = 0; i < 16; ++i) s(i) = std::sin(kTwoPi * g.node(i)(0));
  CHECK(l2_norm(g, s) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("DFT basis is unitary and diagonalizes shifts") {
  for (int d : {1, 2}) {
    const CellGrid g(d, 8);
    const FourierBasis fb = dft_basis(g);
    const Index N = g.size();
    CHECK((fb.inverse * fb.forward - CMatrix::Identity(N, N)).norm() < 1e-12);
    // forward * sqrt(h^-d) is unitary in the plain Euclidean sense
    const CMatrix U = fb.forward / std::sqrt(g.weight());
    CHECK((U * U.adjoint() - CMatrix::Identity(N, N)).norm() < 1e-12);
    // plane wave e^{2 pi i k x} maps to a single coefficient
    CVector u(N);
    for (Index j = 0; j < N; ++j) u(j) = std::exp(Complex(0, kTwoPi * g.node(j)(0)));
    const CVector c = fb.forward * u;
    Index hits = 0;
    for (Index m = 0; m < N; ++m) {
      if (std::abs(c(m)) > 1e-10) {
        ++hits;
        CHECK(g.frequency(m)[0] == 1);
      }
    }
    CHECK(hits == 1);
  }
}

TEST_CASE("operator norm agrees with dense SVD") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    const Index n = 20 + 7 * trial;
    CMatrix m(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) m(i, j) = Complex(nd(rng), nd(rng));
    CHECK(operator_norm(m) == doctest::Approx(testing::svd_norm(m)).epsilon(1e-7));
  }
  RMatrix d = RMatrix::Zero(5, 5);
  d.diagonal() << 1, -7, 3, 2, 0.5;
  CHECK(operator_norm(d) == doctest::Approx(7.0).epsilon(1e-9));
  CHECK(operator_norm(CMatrix(CMatrix::Zero(4, 4))) == 0.0);
}

TEST_CASE("operator norm is submultiplicative and deterministic") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix a(12, 12), b(12, 12);
    for (Index i = 0; i < 12; ++i)
      for (Index j = 0; j < 12; ++j) {
        a(i, j) = Complex(nd(rng), nd(rng));
        b(i, j) = Complex(nd(rng), nd(rng));
      }
    CHECK(operator_norm(CMatrix(a * b)) <= operator_norm(a) * operator_norm(b) * (1 + 1e-8));
  }
  CMatrix a = CMatrix::Random(30, 30);
  CHECK(operator_norm(a) == operator_norm(a));
}

TEST_CASE("clustered singular values fall back to SVD and stay accurate") {
  // two top singular values within 1e-6: plain power iteration stalls
  const Index n = 40;
  RVector s = RVector::LinSpaced(n, 0.1, 1.0);
  s(n - 2) = 1.0 - 1e-6;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  CMatrix g1(n, n), g2(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      g1(i, j) = Complex(nd(rng), nd(rng));
      g2(i, j) = Complex(nd(rng), nd(rng));
    }
  const CMatrix U = Eigen::HouseholderQR<CMatrix>(g1).householderQ();
  const CMatrix V = Eigen::HouseholderQR<CMatrix>(g2).householderQ();
  const CMatrix m = U * s.cast<Complex>().asDiagonal() * V.adjoint();
  const NormResult r = operator_norm_detail(LinearMap{n, [&](const CVector& x) { return CVector(m * x); },
                                                      [&](const CVector& x) { return CVector(m.adjoint() * x); }});
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("linear map norm uses the adjoint") {
  const Index n = 16;
  CMatrix m = CMatrix::Random(n, n);
  LinearMap op{n, [&](const CVector& x) { return CVector(m * x); },
               [&](const CVector& x) { return CVector(m.adjoint() * x); }};
  const NormResult r = operator_norm_detail(op);
  CHECK(r.value == doctest::Approx(testing::svd_norm(m)).epsilon(1e-7));
  CHECK((m * r.vector).norm() == doctest::Approx(r.value).epsilon(1e-7));
}

}
