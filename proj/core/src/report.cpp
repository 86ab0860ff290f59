#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#ifndef CONVHOM_VERSION
#define CONVHOM_VERSION "0.0.0"
#endif

namespace convhom::report {

namespace {

json vec(const RVector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat(const RMatrix& m) {
  json a = json::array();
  for (Index r = 0; r < m.rows(); ++r) a.push_back(vec(RVector(m.row(r).transpose())));
  return a;
}

json fit(const LogLogFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}, {"points", f.points}};
}

json curve(const RateCurve& c) {
  return {{"E", c.E}, {"eps2E", c.scaled}, {"fit", fit(c.fit)}, {"scaled_fit", fit(c.scaled_fit)},
          {"argmax", c.argmax}};
}

std::string csv_name(std::string s) {
  for (char& ch : s) {
    if (ch == '-') ch = '_';
  }
  return s;
}

}  // namespace

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json checked(double value, const char* relation, double tolerance, bool pass) {
  return {{"value", value}, {"relation", relation}, {"tolerance", tolerance}, {"pass", pass}};
}

json header(const std::string& command, const RunConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["versions"] = {{"convhom", CONVHOM_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  j["config"] = json::parse(serialize_config(cfg));
  return j;
}

json effective(const Problem& pb, const RunConfig& cfg) {
  const auto& g = pb.grid();
  const auto& st = pb.stationary();
  const auto& m = pb.model();
  const auto& cs = pb.correctors();
  const auto& co = pb.coercivity();
  const auto [mu_lo, mu_hi] = pb.mu_bounds();
  json j;
  j["grid"] = {{"d", g.dim()}, {"n", g.n()}, {"h", g.spacing()}, {"nodes", g.size()}};
  j["truncation"] = {{"radius", pb.plan().radius}, {"tail_bound", pb.plan().tail_bound}, {"tau", pb.plan().tolerance}};
  j["kernel"] = {{"mass", pb.kernel().mass()},
                 {"moments", pb.moments()},
                 {"first_moment", vec(pb.kernel().first_moment_vector())},
                 {"second_moment", mat(pb.kernel().second_moment_matrix())}};
  j["mu_bounds"] = {mu_lo, mu_hi};
  j["stationary"] = {
      {"method", st.method},
      {"q_minus", st.q_minus},
      {"q_plus", st.q_plus},
      {"gap", st.gap},
      {"eigenvalue_error", checked(st.eigenvalue_error, "<=", cfg.tol("eigenvalue"),
                                   st.eigenvalue_error <= cfg.tol("eigenvalue"))},
      {"residual", checked(st.residual, "<=", cfg.tol("stationary_residual"),
                           st.residual <= cfg.tol("stationary_residual"))},
      {"integral_error", checked(st.integral_error, "<=", cfg.tol("q0_integral"),
                                 st.integral_error <= cfg.tol("q0_integral"))},
      {"q0", vec(st.q0)},
  };
  j["alpha"] = vec(m.alpha);
  j["g0"] = mat(m.g0);
  j["g_raw"] = mat(m.g_raw);
  j["asymmetry"] = m.asymmetry;
  j["g0_min_eigenvalue"] = checked(m.min_eigenvalue, ">=", m.lower_bound, m.lower_bound_ok);
  j["correctors"] = {
      {"constraint_defect", checked(cs.constraint_defect, "<=", cfg.tol("corrector_orthogonality"),
                                    cs.constraint_defect <= cfg.tol("corrector_orthogonality"))},
      {"residual", checked(cs.residual, "<=", cfg.tol("corrector_residual"),
                           cs.residual <= cfg.tol("corrector_residual"))},
      {"condition", cs.condition},
  };
  j["coercivity"] = {{"calM", co.calM},
                     {"r", co.r},
                     {"C_r", co.C_r},
                     {"C_pi", co.C_pi},
                     {"C", co.C},
                     {"search_radius", co.search_radius},
                     {"plateau_min", co.plateau_min},
                     {"edge_deviation", co.edge_deviation},
                     {"plateau_ok", co.plateau_ok}};
  return j;
}

json gap(const SpectralGap& g) {
  return {{"lambda0", g.lambda0}, {"d0", g.d0},
          {"K", g.K},             {"K_samples", g.K_samples},
          {"delta0", g.delta0},   {"contour_radius", g.contour_radius},
          {"a0_norm", g.a0_norm}, {"min_real_part", g.min_real_part}};
}

json ledger(const ConstantsLedger& c) {
  return {{"C1", c.C1},     {"C2", c.C2},     {"C3", c.C3},         {"C4", c.C4},
          {"S", c.S},       {"C5_1", c.C5_1}, {"C5_2", c.C5_2},     {"C5", c.C5},
          {"C5_tilde", c.C5_tilde},           {"c_star", c.c_star}, {"C_theorem", c.C_theorem}};
}

json threshold(const Problem& pb, const ThresholdContext& ctx, const ThresholdReport& tr) {
  json j;
  j["gap"] = gap(ctx.gap);
  j["ledger"] = ledger(ctx.ledger);
  const auto& sp = ctx.spectral;
  j["spectral"] = {{"g", mat(sp.g)},
                   {"g_corrector_route", mat(pb.model().g_raw)},
                   {"R1_residual", sp.R1_residual},
                   {"R1_norm", sp.R1_norm},
                   {"Gj_defect", sp.Gj_defect},
                   {"PGQ_norm", mat(sp.PGQ_norm)},
                   {"QGP_norm", mat(sp.QGP_norm)}};
  j["direction"] = vec(tr.direction);
  json samples = json::array();
  for (const auto& s : tr.samples) {
    samples.push_back({{"xi_norm", s.xi_norm},
                       {"F_minus_P", s.F_minus_P},
                       {"Psi", s.Psi},
                       {"lambda1", {s.lambda1.real(), s.lambda1.imag()}},
                       {"lambda1_remainder", s.lambda1_remainder},
                       {"rank", s.rank},
                       {"nodes", s.nodes},
                       {"defect", s.defect},
                       {"commutator", s.commutator}});
  }
  j["samples"] = samples;
  const bool f_ok = tr.F_fit.slope >= 0.9 && tr.F_fit.slope <= 1.1;
  j["fits"] = {{"F_minus_P", fit(tr.F_fit)}, {"Psi", fit(tr.Psi_fit)}, {"lambda1_remainder", fit(tr.lambda_fit)}};
  j["verdicts"] = {
      {"F_slope", {{"value", tr.F_fit.slope}, {"window", {0.9, 1.1}}, {"pass", f_ok}}},
      {"Psi_slope", checked(tr.Psi_fit.slope, ">=", 2.7, tr.Psi_fit.slope >= 2.7)},
      {"lambda_slope", checked(tr.lambda_fit.slope, ">=", 2.7, tr.lambda_fit.slope >= 2.7)},
      {"F_bound", tr.F_bound_ok},
      {"lambda_real", tr.lambda_real_ok},
      {"rank_one", tr.rank_ok},
      {"slopes", tr.slopes_ok},
  };
  return j;
}

json rate(const RateReport& rr, const SweepConfig& sweep) {
  json j;
  j["eps"] = rr.eps;
  j["sweep"] = {{"points", rr.points.size()}, {"xi_per_axis", sweep.xi_per_axis},
                {"patch_points", sweep.patch_points}, {"norm_tol", sweep.norm_tol}, {"seed", sweep.seed}};
  j["delta0"] = rr.delta0;
  j["full"] = curve(rr.full);
  json ab = json::object();
  for (const auto& [name, c] : rr.ablations) ab[name] = curve(c);
  j["ablations"] = ab;
  const auto& c = rr.certificate;
  j["certificate"] = {{"scaled_slope", {{"value", c.scaled_slope}, {"window", {0.8, 1.15}}, {"pass", c.slope_ok}}},
                      {"decay", {{"first", c.first}, {"last", c.last}, {"relation", "last < first/4"}, {"pass", c.decay_ok}}},
                      {"verdict", c.pass ? "PASS" : "FAIL"}};
  j["constants"] = {{"C_hat", rr.C_hat}, {"C1", rr.C1}, {"C5", rr.C5}, {"C_theorem", rr.C_theorem},
                    {"C_hat_finite", std::isfinite(rr.C_hat)}};
  return j;
}

json selfcheck(const SelfcheckReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"tolerance", c.tolerance},
                      {"pass", c.pass}, {"skipped", c.skipped}, {"detail", c.detail}});
  }
  return {{"checks", checks}, {"count", rep.checks.size()}, {"pass", rep.pass}};
}

std::string threshold_csv(const ThresholdReport& tr) {
  std::string out = "xi_norm,F_minus_P,Psi,lambda1_re,lambda1_im\n";
  for (const auto& s : tr.samples) {
    out += fmt(s.xi_norm) + "," + fmt(s.F_minus_P) + "," + fmt(s.Psi) + "," + fmt(s.lambda1.real()) + "," +
           fmt(s.lambda1.imag()) + "\n";
  }
  return out;
}

std::string rate_csv(const RateReport& rr) {
  std::string out = "eps,E,eps2E";
  for (const auto& [name, c] : rr.ablations) out += ",E_" + csv_name(name) + ",eps2E_" + csv_name(name);
  out += "\n";
  for (std::size_t i = 0; i < rr.eps.size(); ++i) {
    out += fmt(rr.eps[i]) + "," + fmt(rr.full.E[i]) + "," + fmt(rr.full.scaled[i]);
    for (const auto& [name, c] : rr.ablations) out += "," + fmt(c.E[i]) + "," + fmt(c.scaled[i]);
    out += "\n";
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::configuration, "report", "cannot write '" + path + "'");
  out << text;
  if (!out) raise(ErrorKind::configuration, "report", "write failed for '" + path + "'");
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace convhom::report
