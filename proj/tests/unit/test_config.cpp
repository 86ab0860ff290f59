#include "convhom/config.hpp"
#include "test_helpers.hpp"

#include <fstream>
#include <sstream>
#include <string>

using namespace convhom;

namespace {

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::configuration);
    return e.what();
  }
  FAIL("expected a configuration error");
  return {};
}

const char* kMinimal = R"({
  "schema_version": 1,
  "kernel": {"family": "gaussian", "center": [0.3], "sigma": 0.3},
  "mu": {"family": "constant"},
  "grid": {"d": 1, "n": 32}
})";

}  // namespace

TEST_SUITE("config") {

TEST_CASE("round trip is the identity") {
  for (const char* name : {"gauss_mu1_1d.json", "exptrig_gauss_2d.json", "rate_default_1d.json",
                           "skew_mixture_explicit_1d.json", "box_mu1_1d.json", "threshold_default_1d.json"}) {
    CAPTURE(name);
    const RunConfig a = parse_config(read(std::string(CONVHOM_TEST_CONFIG_DIR) + "/" + name));
    const std::string sa = serialize_config(a);
    const RunConfig b = parse_config(sa);
    CHECK(serialize_config(b) == sa);
  }
}

TEST_CASE("defaults") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.n == 32);
  CHECK(c.tau == 1e-12);
  CHECK(c.threshold.count == 12);
  CHECK(c.sweep.eps.size() == 6);
  CHECK(c.tol("two_route_rel") == 1e-6);
  CHECK(c.tolerances.size() == default_tolerances().size());
  CHECK(c.kernel->first_moment_vector()(0) == doctest::Approx(0.3));
  CHECK(c.problem_options().stationary.residual == 1e-8);
}

TEST_CASE("fixture configs take the fixture's tolerances") {
  const RunConfig c = parse_config(R"({"schema_version": 1, "fixture": "exponential_mu1_1d"})");
  CHECK(c.tol("potential_rel") == 1e-3);
  CHECK(c.n == 128);
  const RunConfig d = parse_config(
      R"({"schema_version": 1, "fixture": "exponential_mu1_1d", "tolerances": {"potential_rel": 0.01}, "grid": {"n": 64}})");
  CHECK(d.tol("potential_rel") == 0.01);
  CHECK(d.n == 64);
}

TEST_CASE("diagnostics name the offending field") {
  CHECK(message_of(R"({"schema_version": 1, "fixture": "gauss_mu1_1d", "colour": 3})").find("colour") !=
        std::string::npos);
  CHECK(message_of(R"({"schema_version": 2, "fixture": "gauss_mu1_1d"})").find("schema_version") !=
        std::string::npos);
  CHECK(message_of(R"({"fixture": "gauss_mu1_1d"})").find("schema_version") != std::string::npos);
  CHECK(message_of(R"({"schema_version": 1, "fixture": "nope"})").find("nope") != std::string::npos);
  CHECK(message_of(R"({"schema_version": 1, "fixture": "gauss_mu1_1d", "grid": {"n": 7}})").find("grid.n") !=
        std::string::npos);
  CHECK(message_of(R"({"schema_version": 1, "fixture": "gauss_mu1_1d", "sweep": {"eps": [0.5, -1]}})")
            .find("sweep.eps") != std::string::npos);
  CHECK(message_of(R"({"schema_version": 1, "fixture": "gauss_mu1_1d", "tolerances": {"bogus": 1}})")
            .find("tolerances.bogus") != std::string::npos);
  CHECK(message_of(R"({"schema_version": 1,
      "kernel": {"family": "gaussian", "center": [0.0], "sigma": 0.3},
      "mu": {"family": "separable", "f": {"constant": 1.0, "modes": [{"k": [1], "cos": 2.0}]}},
      "grid": {"d": 1, "n": 32}})")
            .find("mu") != std::string::npos);
  CHECK(message_of(R"({"schema_version": 1,
      "kernel": {"family": "gaussian", "center": [0.0], "sigma": 0.3, "skew": 1},
      "mu": {"family": "constant"}, "grid": {"d": 1, "n": 32}})")
            .find("kernel.skew") != std::string::npos);
  CHECK(message_of(R"({"schema_version": 1,
      "kernel": {"family": "gaussian", "center": [0.0, 0.0], "sigma": 0.3},
      "mu": {"family": "constant"}, "grid": {"d": 1, "n": 32}})")
            .find("kernel") != std::string::npos);
  CHECK(message_of("{not json").find("invalid JSON") != std::string::npos);
}

TEST_CASE("missing file") {
  CHECK(testing::error_kind([] { load_config("/nonexistent/config.json"); }) == ErrorKind::configuration);
}

}
