#include "convhom/commands.hpp"
#include "test_helpers.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace convhom;
namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  explicit Sandbox(const std::string& name) : dir(fs::temp_directory_path() / ("convhom_test_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  std::string write(const std::string& file, const std::string& text) const {
    std::ofstream(dir / file) << text;
    return (dir / file).string();
  }
  std::string read(const std::string& file) const {
    std::ifstream in(dir / file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& command, const std::string& config, CommandOptions opt) {
  std::ostringstream out, err;
  opt.log = &out;
  opt.err = &err;
  const int code = run_command(command, config, opt);
  return {code, out.str(), err.str()};
}

const char* kGauss = R"({
  "schema_version": 1,
  "kernel": {"family": "gaussian", "center": [0.0], "sigma": 0.3},
  "mu": {"family": "constant"},
  "grid": {"d": 1, "n": 64}
})";

}  // namespace

TEST_SUITE("commands") {

TEST_CASE("effective report for a symmetric gaussian") {
  Sandbox sb("effective");
  const std::string cfg = sb.write("c.json", kGauss);
  CommandOptions opt;
  opt.out = (sb.dir / "out").string();
  const Run r = run("effective", cfg, opt);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(sb.read("out/effective.json"));
  CHECK(j["schema_version"] == 1);
  CHECK(std::abs(j["effective"]["alpha"][0].get<double>()) < 1e-12);
  CHECK(j["effective"]["g0"][0][0].get<double>() == doctest::Approx(0.045).epsilon(1e-9));
  for (const auto& q : j["effective"]["stationary"]["q0"]) CHECK(std::abs(q.get<double>() - 1.0) < 1e-8);
  CHECK(j["effective"]["stationary"]["residual"]["tolerance"] == 1e-8);
  CHECK(fs::exists(sb.dir / "out" / "timing.effective.json"));

  // byte-identical rerun
  const std::string first = sb.read("out/effective.json");
  REQUIRE(run("effective", cfg, opt).code == 0);
  CHECK(sb.read("out/effective.json") == first);
}

TEST_CASE("configuration errors exit with 2") {
  Sandbox sb("malformed");
  const std::string cfg = sb.write("bad.json", R"({
    "schema_version": 1,
    "kernel": {"family": "gaussian", "center": [0.0], "sigma": 0.3},
    "mu": {"family": "separable", "g": {"constant": 0.5, "modes": [{"k": [1], "sin": 0.9}]}},
    "grid": {"d": 1, "n": 64}})");
  CommandOptions opt;
  opt.out = (sb.dir / "out").string();
  const Run r = run("effective", cfg, opt);
  CHECK(r.code == 2);
  CHECK(r.err.find("mu") != std::string::npos);
  CHECK(run("effective", (sb.dir / "missing.json").string(), opt).code == 2);
  CHECK(run("bogus", cfg, opt).code == 2);
}

TEST_CASE("threshold files") {
  Sandbox sb("threshold");
  const std::string cfg = sb.write("c.json", R"({"schema_version": 1, "fixture": "separable_gauss_1d", "grid": {"n": 64}})");
  CommandOptions opt;
  opt.out = (sb.dir / "out").string();
  const Run r = run("threshold", cfg, opt);
  CHECK(r.code == 0);
  const std::string csv = sb.read("out/threshold.csv");
  CHECK(csv.substr(0, csv.find('\n')) == "xi_norm,F_minus_P,Psi,lambda1_re,lambda1_im");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
  const auto j = nlohmann::json::parse(sb.read("out/threshold.json"));
  CHECK(j["threshold"]["verdicts"]["slopes"] == true);
  CHECK(j["threshold"]["samples"].size() == 12);
}

TEST_CASE("rate with ablations") {
  Sandbox sb("rate");
  const std::string cfg = sb.write(
      "c.json", R"({"schema_version": 1, "fixture": "shifted_gauss_mu1_1d", "grid": {"n": 32},
                    "sweep": {"xi_per_axis": 16, "patch_points": 6}})");
  CommandOptions opt;
  opt.out = (sb.dir / "out").string();
  opt.ablations = parse_ablation_list("no-drift,no-q0");
  opt.threads = 2;
  const Run r = run("rate", cfg, opt);
  CHECK((r.code == 0 || r.code == 1));
  const std::string csv = sb.read("out/rate.csv");
  CHECK(csv.substr(0, csv.find('\n')) == "eps,E,eps2E,E_no_drift,eps2E_no_drift,E_no_q0,eps2E_no_q0");
  const auto j = nlohmann::json::parse(sb.read("out/rate.json"));
  CHECK(j["rate"]["ablations"].contains("no-drift"));
  CHECK(j["rate"]["constants"]["C1"].get<double>() > 0);

  const std::string sym = sb.write("s.json", R"({"schema_version": 1, "fixture": "gauss_mu1_1d", "grid": {"n": 16}})");
  CommandOptions o2 = opt;
  o2.ablations = {Ablation::no_drift};
  CHECK(run("rate", sym, o2).code == 2);
  CHECK(testing::error_kind([] { parse_ablation_list("no-drift,sideways"); }) == ErrorKind::usage);
}

TEST_CASE("selfcheck passes for constant mu and catches a corrupted q0") {
  Sandbox sb("selfcheck");
  const std::string cfg = sb.write("c.json", kGauss);
  CommandOptions opt;
  opt.out = (sb.dir / "out").string();
  const Run ok = run("selfcheck", cfg, opt);
  CHECK(ok.code == 0);
  const auto j = nlohmann::json::parse(sb.read("out/selfcheck.json"));
  CHECK(j["selfcheck"]["count"].get<int>() >= 15);
  CHECK(j["selfcheck"]["pass"] == true);

  opt.inject_fault = "corrupt-q0";
  const Run bad = run("selfcheck", cfg, opt);
  CHECK(bad.code == 1);
  CHECK(bad.err.find("accretivity") != std::string::npos);
}

TEST_CASE("selfcheck on a non-symmetric coefficient") {
  Sandbox sb("selfcheck2");
  const std::string cfg = sb.write("c.json", R"({"schema_version": 1, "fixture": "separable_gauss_1d", "grid": {"n": 64}})");
  CommandOptions opt;
  opt.out = (sb.dir / "out").string();
  const Run r = run("selfcheck", cfg, opt);
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

}
