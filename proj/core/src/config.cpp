#include "convhom/config.hpp"

#include "convhom/fixtures.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace convhom {

using json = nlohmann::json;

namespace {

constexpr const char* kStage = "config";

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  raise(ErrorKind::configuration, kStage, path + ": " + msg);
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) bad(path.empty() ? k : path + "." + k, "unknown key");
  }
}

const json& need(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) bad(path + "." + key, "missing");
  return j.at(key);
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<int>();
}

std::vector<int> int_list(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(integer(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Coord vector_of(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) bad(path, "expected a non-empty array of numbers");
  Coord c(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) c(static_cast<Index>(i)) = num(j[i], path + "[" + std::to_string(i) + "]");
  return c;
}

RMatrix matrix_of(const json& j, const std::string& path, Index d) {
  if (!j.is_array() || static_cast<Index>(j.size()) != d) bad(path, "expected a d x d array");
  RMatrix m(d, d);
  for (Index r = 0; r < d; ++r) {
    const Coord row = vector_of(j[static_cast<std::size_t>(r)], path + "[" + std::to_string(r) + "]");
    if (row.size() != d) bad(path, "expected a d x d array");
    m.row(r) = row.transpose();
  }
  return m;
}

json to_json(const Coord& c) {
  json a = json::array();
  for (Index i = 0; i < c.size(); ++i) a.push_back(c(i));
  return a;
}

json to_json(const RMatrix& m) {
  json a = json::array();
  for (Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Coord(m.row(r).transpose())));
  return a;
}

// Errors from the spec factories are rewrapped with the field path.
template <class F>
auto wrap(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::configuration) throw;
    bad(path, e.what());
  }
}

KernelSpec parse_component(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  const std::string family = need(j, path, "family").get<std::string>();
  const double amp = j.contains("amplitude") ? num(j.at("amplitude"), path + ".amplitude") : 1.0;
  if (family == "gaussian") {
    reject_unknown(j, path, {"family", "center", "covariance", "sigma", "amplitude"});
    const Coord c = vector_of(need(j, path, "center"), path + ".center");
    RMatrix cov;
    if (j.contains("sigma") == j.contains("covariance")) bad(path, "gaussian needs exactly one of sigma, covariance");
    if (j.contains("sigma")) {
      const double s = num(j.at("sigma"), path + ".sigma");
      cov = s * s * RMatrix::Identity(c.size(), c.size());
    } else {
      cov = matrix_of(j.at("covariance"), path + ".covariance", c.size());
    }
    return wrap(path, [&] { return KernelSpec::gaussian(c, cov, amp); });
  }
  if (family == "box") {
    reject_unknown(j, path, {"family", "center", "halfwidths", "amplitude"});
    const Coord c = vector_of(need(j, path, "center"), path + ".center");
    const Coord hw = vector_of(need(j, path, "halfwidths"), path + ".halfwidths");
    return wrap(path, [&] { return KernelSpec::box(c, hw, amp); });
  }
  if (family == "exponential") {
    reject_unknown(j, path, {"family", "center", "rate", "amplitude"});
    const Coord c = vector_of(need(j, path, "center"), path + ".center");
    const double rate = num(need(j, path, "rate"), path + ".rate");
    return wrap(path, [&] { return KernelSpec::exponential(c, rate, amp); });
  }
  bad(path + ".family", "unknown kernel family '" + family + "'");
}

KernelSpec parse_kernel(const json& j) {
  const std::string path = "kernel";
  if (!j.is_object()) bad(path, "expected an object");
  if (j.contains("family") && j.at("family") == "mixture") {
    reject_unknown(j, path, {"family", "components"});
    const json& parts = need(j, path, "components");
    if (!parts.is_array() || parts.empty()) bad(path + ".components", "expected a non-empty array");
    std::vector<KernelSpec> specs;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      specs.push_back(parse_component(parts[i], path + ".components[" + std::to_string(i) + "]"));
    }
    return wrap(path, [&] { return KernelSpec::mixture(specs); });
  }
  return parse_component(j, path);
}

json component_json(const KernelComponent& c) {
  json j;
  j["family"] = to_string(c.family);
  j["center"] = to_json(c.center);
  j["amplitude"] = c.amplitude;
  switch (c.family) {
    case KernelFamily::gaussian: j["covariance"] = to_json(c.covariance); break;
    case KernelFamily::box: j["halfwidths"] = to_json(c.halfwidths); break;
    case KernelFamily::exponential: j["rate"] = c.rate; break;
    case KernelFamily::mixture: break;
  }
  return j;
}

json kernel_json(const KernelSpec& k) {
  if (k.family() != KernelFamily::mixture) return component_json(k.components().front());
  json parts = json::array();
  for (const auto& c : k.components()) parts.push_back(component_json(c));
  return json{{"family", "mixture"}, {"components", parts}};
}

TrigPolynomial parse_trig_poly(const json& j, const std::string& path, int d) {
  reject_unknown(j, path, {"constant", "modes"});
  TrigPolynomial p;
  if (j.contains("constant")) p.constant = num(j.at("constant"), path + ".constant");
  if (j.contains("modes")) {
    const json& modes = j.at("modes");
    if (!modes.is_array()) bad(path + ".modes", "expected an array");
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const std::string mp = path + ".modes[" + std::to_string(i) + "]";
      reject_unknown(modes[i], mp, {"k", "cos", "sin"});
      TrigMode m;
      m.k = int_list(need(modes[i], mp, "k"), mp + ".k");
      if (static_cast<int>(m.k.size()) != d) bad(mp + ".k", "expected d entries");
      if (modes[i].contains("cos")) m.cos_coeff = num(modes[i].at("cos"), mp + ".cos");
      if (modes[i].contains("sin")) m.sin_coeff = num(modes[i].at("sin"), mp + ".sin");
      p.modes.push_back(m);
    }
  }
  return p;
}

json trig_poly_json(const TrigPolynomial& p) {
  json modes = json::array();
  for (const auto& m : p.modes) modes.push_back({{"k", m.k}, {"cos", m.cos_coeff}, {"sin", m.sin_coeff}});
  return json{{"constant", p.constant}, {"modes", modes}};
}

MuSpec parse_mu(const json& j, int d) {
  const std::string path = "mu";
  if (!j.is_object()) bad(path, "expected an object");
  const std::string family = need(j, path, "family").get<std::string>();
  if (family == "constant") {
    reject_unknown(j, path, {"family", "value"});
    const double v = j.contains("value") ? num(j.at("value"), path + ".value") : 1.0;
    return wrap(path + ".value", [&] { return MuSpec::constant(d, v); });
  }
  if (family == "exp_trig") {
    reject_unknown(j, path, {"family", "terms"});
    const json& terms = need(j, path, "terms");
    if (!terms.is_array()) bad(path + ".terms", "expected an array");
    std::vector<ExpTrigTerm> out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string tp = path + ".terms[" + std::to_string(i) + "]";
      reject_unknown(terms[i], tp, {"beta", "kx", "ky", "trig"});
      ExpTrigTerm t;
      t.beta = num(need(terms[i], tp, "beta"), tp + ".beta");
      t.kx = int_list(need(terms[i], tp, "kx"), tp + ".kx");
      t.ky = int_list(need(terms[i], tp, "ky"), tp + ".ky");
      const std::string trig = terms[i].contains("trig") ? terms[i].at("trig").get<std::string>() : "cos";
      if (trig == "cos") {
        t.trig = Trig::cos;
      } else if (trig == "sin") {
        t.trig = Trig::sin;
      } else {
        bad(tp + ".trig", "expected cos or sin");
      }
      out.push_back(t);
    }
    return wrap(path + ".terms", [&] { return MuSpec::exp_trig(d, out); });
  }
  if (family == "separable") {
    reject_unknown(j, path, {"family", "f", "g"});
    TrigPolynomial f, g;
    if (j.contains("f")) f = parse_trig_poly(j.at("f"), path + ".f", d);
    if (j.contains("g")) g = parse_trig_poly(j.at("g"), path + ".g", d);
    return wrap(path, [&] { return MuSpec::separable(d, f, g); });
  }
  bad(path + ".family", "unknown mu family '" + family + "'");
}

json mu_json(const MuSpec& mu) {
  switch (mu.family()) {
    case MuFamily::constant: return json{{"family", "constant"}, {"value", mu.constant_value()}};
    case MuFamily::exp_trig: {
      json terms = json::array();
      for (const auto& t : mu.terms()) {
        terms.push_back(
            {{"beta", t.beta}, {"kx", t.kx}, {"ky", t.ky}, {"trig", t.trig == Trig::cos ? "cos" : "sin"}});
      }
      return json{{"family", "exp_trig"}, {"terms", terms}};
    }
    case MuFamily::separable_trig:
      return json{{"family", "separable"}, {"f", trig_poly_json(mu.f())}, {"g", trig_poly_json(mu.g())}};
  }
  return {};
}

void apply_fixture_tolerances(std::map<std::string, double>& t, const ProblemOptions& o) {
  t["potential_rel"] = o.assembly.potential_rel;
  t["schur_rel"] = o.assembly.schur_rel;
  t["moment_rel"] = o.assembly.moment_rel;
}

}  // namespace

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t = {
      {"potential_rel", 1e-8},    {"schur_rel", 1e-8},        {"moment_rel", 1e-6},
      {"eigenvalue", 1e-8},       {"gap_min", 1e-6},          {"sign", 1e-10},
      {"stationary_residual", 1e-8}, {"q0_integral", 1e-10},  {"mu1_q0", 1e-8},
      {"oracle_rel", 1e-10},      {"two_route_rel", 1e-6},    {"projector", 1e-10},
      {"accretive_abs", 1e-10},   {"coercive_fraction", 0.9}, {"annulus_slack", 1e-3},
      {"xi_bound_slack", 0.01},   {"corrector_orthogonality", 1e-8}, {"corrector_residual", 1e-8},
  };
  return t;
}

double RunConfig::tol(const std::string& name) const {
  const auto it = tolerances.find(name);
  if (it != tolerances.end()) return it->second;
  const auto& defs = default_tolerances();
  const auto d = defs.find(name);
  if (d == defs.end()) raise(ErrorKind::usage, kStage, "unknown tolerance '" + name + "'");
  return d->second;
}

ProblemOptions RunConfig::problem_options() const {
  ProblemOptions o;
  o.n = n;
  o.tau = tau;
  o.radius_cap = radius_cap;
  o.assembly.potential_rel = tol("potential_rel");
  o.assembly.schur_rel = tol("schur_rel");
  o.assembly.moment_rel = tol("moment_rel");
  o.stationary.eigenvalue = tol("eigenvalue");
  o.stationary.gap_min = tol("gap_min");
  o.stationary.sign = tol("sign");
  o.stationary.residual = tol("stationary_residual");
  return o;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad("<document>", std::string("invalid JSON: ") + e.what());
  }
  try {
    reject_unknown(j, "", {"schema_version", "fixture", "kernel", "mu", "grid", "truncation", "sweep", "threshold",
                           "tolerances", "output"});
    RunConfig cfg;
    cfg.schema_version = integer(need(j, "", "schema_version"), "schema_version");
    if (cfg.schema_version != kSchemaVersion) {
      bad("schema_version", "unsupported version " + std::to_string(cfg.schema_version));
    }
    cfg.tolerances = default_tolerances();

    if (j.contains("fixture")) {
      if (j.contains("kernel") || j.contains("mu")) bad("fixture", "cannot be combined with kernel or mu");
      cfg.fixture = j.at("fixture").get<std::string>();
      const Fixture f = make_fixture(cfg.fixture);
      cfg.kernel = f.kernel;
      cfg.mu = f.mu;
      cfg.d = f.kernel.dim();
      cfg.n = f.options.n;
      apply_fixture_tolerances(cfg.tolerances, f.options);
    }

    if (j.contains("grid")) {
      const json& g = j.at("grid");
      reject_unknown(g, "grid", {"d", "n"});
      if (g.contains("d")) cfg.d = integer(g.at("d"), "grid.d");
      if (g.contains("n")) cfg.n = integer(g.at("n"), "grid.n");
    } else if (cfg.fixture.empty()) {
      bad("grid", "missing");
    }
    if (cfg.d != 1 && cfg.d != 2) bad("grid.d", "must be 1 or 2");
    if (cfg.n < 2 || cfg.n % 2 != 0) bad("grid.n", "must be an even integer >= 2");

    if (cfg.fixture.empty()) {
      cfg.kernel = parse_kernel(need(j, "", "kernel"));
      if (cfg.kernel->dim() != cfg.d) bad("kernel", "dimension differs from grid.d");
      cfg.mu = parse_mu(need(j, "", "mu"), cfg.d);
    } else if (cfg.kernel->dim() != cfg.d) {
      bad("grid.d", "differs from the fixture dimension");
    }

    if (j.contains("truncation")) {
      const json& t = j.at("truncation");
      reject_unknown(t, "truncation", {"tau", "radius_cap"});
      if (t.contains("tau")) cfg.tau = num(t.at("tau"), "truncation.tau");
      if (t.contains("radius_cap")) cfg.radius_cap = integer(t.at("radius_cap"), "truncation.radius_cap");
      if (!(cfg.tau > 0.0)) bad("truncation.tau", "must be positive");
      if (cfg.radius_cap < 1) bad("truncation.radius_cap", "must be >= 1");
    }

    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      reject_unknown(s, "sweep", {"xi_per_axis", "patch_points", "eps", "norm_tol", "seed", "threads"});
      auto& sw = cfg.sweep;
      if (s.contains("xi_per_axis")) sw.xi_per_axis = integer(s.at("xi_per_axis"), "sweep.xi_per_axis");
      if (s.contains("patch_points")) sw.patch_points = integer(s.at("patch_points"), "sweep.patch_points");
      if (s.contains("eps")) {
        const Coord e = vector_of(s.at("eps"), "sweep.eps");
        sw.eps.assign(e.data(), e.data() + e.size());
      }
      if (s.contains("norm_tol")) sw.norm_tol = num(s.at("norm_tol"), "sweep.norm_tol");
      if (s.contains("seed")) {
        if (!s.at("seed").is_number_unsigned()) bad("sweep.seed", "expected a non-negative integer");
        sw.seed = s.at("seed").get<std::uint64_t>();
      }
      if (s.contains("threads")) sw.threads = integer(s.at("threads"), "sweep.threads");
      if (sw.xi_per_axis < 0 || sw.xi_per_axis % 2 != 0) bad("sweep.xi_per_axis", "must be 0 or a positive even integer");
      if (sw.patch_points < 0) bad("sweep.patch_points", "must be >= 0");
      if (sw.threads < 1) bad("sweep.threads", "must be >= 1");
      if (!(sw.norm_tol > 0.0)) bad("sweep.norm_tol", "must be positive");
      for (double e : sw.eps) {
        if (!(e > 0.0 && e <= 1.0)) bad("sweep.eps", "entries must lie in (0, 1]");
      }
    }

    if (j.contains("threshold")) {
      const json& t = j.at("threshold");
      reject_unknown(t, "threshold", {"count", "direction"});
      if (t.contains("count")) cfg.threshold.count = integer(t.at("count"), "threshold.count");
      if (t.contains("direction")) cfg.threshold.direction = vector_of(t.at("direction"), "threshold.direction");
      if (cfg.threshold.count < 4) bad("threshold.count", "must be >= 4");
      if (cfg.threshold.direction.size() != 0 &&
          (cfg.threshold.direction.size() != cfg.d || !(cfg.threshold.direction.norm() > 0.0))) {
        bad("threshold.direction", "expected a non-zero vector of length d");
      }
    }

    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      if (!t.is_object()) bad("tolerances", "expected an object");
      for (const auto& [k, v] : t.items()) {
        if (!default_tolerances().count(k)) bad("tolerances." + k, "unknown tolerance");
        const double x = num(v, "tolerances." + k);
        if (!(x > 0.0)) bad("tolerances." + k, "must be positive");
        cfg.tolerances[k] = x;
      }
    }

    if (j.contains("output")) {
      if (!j.at("output").is_string()) bad("output", "expected a string");
      cfg.output = j.at("output").get<std::string>();
    }
    return cfg;
  } catch (const json::exception& e) {
    bad("<document>", e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::configuration, kStage, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  if (!cfg.fixture.empty()) {
    j["fixture"] = cfg.fixture;
  } else {
    if (cfg.kernel) j["kernel"] = kernel_json(*cfg.kernel);
    if (cfg.mu) j["mu"] = mu_json(*cfg.mu);
  }
  j["grid"] = {{"d", cfg.d}, {"n", cfg.n}};
  j["truncation"] = {{"tau", cfg.tau}, {"radius_cap", cfg.radius_cap}};
  const auto& sw = cfg.sweep;
  j["sweep"] = {{"xi_per_axis", sw.xi_per_axis}, {"patch_points", sw.patch_points}, {"eps", sw.eps},
                {"norm_tol", sw.norm_tol},       {"seed", sw.seed},                 {"threads", sw.threads}};
  json th{{"count", cfg.threshold.count}};
  if (cfg.threshold.direction.size() != 0) th["direction"] = to_json(cfg.threshold.direction);
  j["threshold"] = th;
  j["tolerances"] = cfg.tolerances;
  j["output"] = cfg.output;
  return j.dump(2) + "\n";
}

}  // namespace convhom
