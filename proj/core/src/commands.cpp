#include "convhom/commands.hpp"

#include "convhom/problem.hpp"
#include "convhom/selfcheck.hpp"
#include "convhom/threshold_analysis.hpp"
#include "report.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace convhom {

namespace {

constexpr const char* kStage = "cli";

std::ostream& log_of(const CommandOptions& opt) { return opt.log ? *opt.log : std::cout; }
std::ostream& err_of(const CommandOptions& opt) { return opt.err ? *opt.err : std::cerr; }

class Timer {
 public:
  void mark(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    stages_[stage] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  report::json json() const {
    report::json j = stages_;
    j["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return j;
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
  std::chrono::steady_clock::time_point last_ = start_;
  std::map<std::string, double> stages_;
};

std::string output_dir(const RunConfig& cfg, const CommandOptions& opt) {
  const std::string dir = opt.out.empty() ? cfg.output : opt.out;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) raise(ErrorKind::configuration, kStage, "cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

RunConfig effective_config(RunConfig cfg, const CommandOptions& opt) {
  if (opt.threads) {
    if (*opt.threads < 1) raise(ErrorKind::configuration, kStage, "--threads must be >= 1");
    cfg.sweep.threads = *opt.threads;
  }
  if (opt.seed) cfg.sweep.seed = *opt.seed;
  if (!opt.out.empty()) cfg.output = opt.out;
  return cfg;
}

Problem build_problem(const RunConfig& cfg, const CommandOptions& opt) {
  if (!cfg.kernel || !cfg.mu) raise(ErrorKind::configuration, kStage, "config has no kernel/mu");
  Problem pb(*cfg.kernel, *cfg.mu, cfg.problem_options());
  if (opt.inject_fault == "corrupt-q0") {
    RVector q = pb.q0();
    for (Index i = 0; i < q.size(); ++i) q(i) *= 1.0 + 0.5 * std::cos(kTwoPi * pb.grid().node(i)(0));
    q /= pb.grid().weight() * q.sum();
    pb.replace_q0(q);
  } else if (!opt.inject_fault.empty()) {
    raise(ErrorKind::usage, kStage, "unknown fault '" + opt.inject_fault + "'");
  }
  return pb;
}

void write_timing(const std::string& dir, const std::string& command, const Timer& t) {
  report::write_json(dir + "/timing." + command + ".json", report::json{{"command", command}, {"seconds", t.json()}});
}

}  // namespace

std::vector<Ablation> parse_ablation_list(const std::string& list) {
  std::vector<Ablation> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const Ablation a = parse_ablation(item);
    if (a == Ablation::none) raise(ErrorKind::usage, kStage, "ablation list may not contain 'none'");
    bool dup = false;
    for (Ablation b : out) dup = dup || b == a;
    if (!dup) out.push_back(a);
  }
  return out;
}

int cmd_effective(const RunConfig& in, const CommandOptions& opt) {
  const RunConfig cfg = effective_config(in, opt);
  const std::string dir = output_dir(cfg, opt);
  Timer timer;
  const Problem pb = build_problem(cfg, opt);
  timer.mark("problem");
  report::json j = report::header("effective", cfg);
  j["effective"] = report::effective(pb, cfg);
  report::write_json(dir + "/effective.json", j);
  write_timing(dir, "effective", timer);

  const auto& m = pb.model();
  auto& log = log_of(opt);
  log << "alpha = " << m.alpha.transpose() << "\n"
      << "g0 =\n" << m.g0 << "\n"
      << "q0 in [" << pb.stationary().q_minus << ", " << pb.stationary().q_plus << "]\n"
      << "wrote " << dir << "/effective.json\n";
  return m.lower_bound_ok ? 0 : 1;
}

int cmd_threshold(const RunConfig& in, const CommandOptions& opt) {
  const RunConfig cfg = effective_config(in, opt);
  const std::string dir = output_dir(cfg, opt);
  Timer timer;
  const Problem pb = build_problem(cfg, opt);
  timer.mark("problem");
  const ThresholdContext ctx = analyze_threshold(pb);
  timer.mark("gap_and_spectral");
  const ThresholdReport tr = run_threshold(pb, ctx, cfg.threshold.count, cfg.threshold.direction);
  timer.mark("samples");

  report::json j = report::header("threshold", cfg);
  j["effective"] = report::effective(pb, cfg);
  j["threshold"] = report::threshold(pb, ctx, tr);
  report::write_json(dir + "/threshold.json", j);
  report::write_text(dir + "/threshold.csv", report::threshold_csv(tr));
  write_timing(dir, "threshold", timer);

  const bool ok = tr.slopes_ok && tr.rank_ok && tr.F_bound_ok && tr.lambda_real_ok;
  log_of(opt) << "slopes: |F-P| " << tr.F_fit.slope << ", |Psi| " << tr.Psi_fit.slope << ", lambda1 remainder "
              << tr.lambda_fit.slope << "\n"
              << "verdict: " << (ok ? "PASS" : "FAIL") << "\n"
              << "wrote " << dir << "/threshold.json, threshold.csv\n";
  return ok ? 0 : 1;
}

int cmd_rate(const RunConfig& in, const CommandOptions& opt) {
  const RunConfig cfg = effective_config(in, opt);
  const std::string dir = output_dir(cfg, opt);
  Timer timer;
  const Problem pb = build_problem(cfg, opt);
  for (Ablation a : opt.ablations) check_ablation(pb, a);
  timer.mark("problem");
  const ThresholdContext ctx = analyze_threshold(pb);
  timer.mark("gap_and_spectral");
  RateReport rr = sup_sweep(pb, cfg.sweep, ctx.gap.delta0, opt.ablations);
  rr.C1 = ctx.ledger.C1;
  rr.C5 = ctx.ledger.C5;
  rr.C_theorem = ctx.ledger.C_theorem;
  timer.mark("sweep");

  report::json j = report::header("rate", cfg);
  j["gap"] = report::gap(ctx.gap);
  j["ledger"] = report::ledger(ctx.ledger);
  j["rate"] = report::rate(rr, cfg.sweep);
  report::write_json(dir + "/rate.json", j);
  report::write_text(dir + "/rate.csv", report::rate_csv(rr));
  write_timing(dir, "rate", timer);

  auto& log = log_of(opt);
  log << "eps          E(eps)                 eps^2 E(eps)\n";
  for (std::size_t i = 0; i < rr.eps.size(); ++i) {
    log << report::fmt(rr.eps[i]) << "  " << report::fmt(rr.full.E[i]) << "  " << report::fmt(rr.full.scaled[i]) << "\n";
  }
  log << "scaled slope " << rr.certificate.scaled_slope << ", C_hat " << rr.C_hat << " (C1 " << rr.C1 << ")\n";
  for (const auto& [name, c] : rr.ablations) log << name << ": scaled slope " << c.scaled_fit.slope << "\n";
  log << "certificate: " << (rr.certificate.pass ? "PASS" : "FAIL") << "\n"
      << "wrote " << dir << "/rate.json, rate.csv\n";
  return rr.certificate.pass ? 0 : 1;
}

int cmd_selfcheck(const RunConfig& in, const CommandOptions& opt) {
  const RunConfig cfg = effective_config(in, opt);
  const std::string dir = output_dir(cfg, opt);
  Timer timer;
  const Problem pb = build_problem(cfg, opt);
  timer.mark("problem");
  const ThresholdContext ctx = analyze_threshold(pb);
  timer.mark("gap_and_spectral");
  const SelfcheckReport rep = run_selfcheck(pb, ctx, cfg);
  timer.mark("checks");

  report::json j = report::header("selfcheck", cfg);
  j["selfcheck"] = report::selfcheck(rep);
  report::write_json(dir + "/selfcheck.json", j);
  write_timing(dir, "selfcheck", timer);

  log_of(opt) << format_selfcheck(rep);
  if (!rep.pass) {
    for (const auto& c : rep.checks) {
      if (!c.pass) {
        err_of(opt) << "invariant failed: " << c.name << " = " << report::fmt(c.value) << " (required " << c.relation
                    << " " << report::fmt(c.tolerance) << ")\n";
      }
    }
  }
  return rep.pass ? 0 : 1;
}

int run_command(const std::string& command, const std::string& config_path, const CommandOptions& opt) {
  try {
    const RunConfig cfg = load_config(config_path);
    if (command == "effective") return cmd_effective(cfg, opt);
    if (command == "threshold") return cmd_threshold(cfg, opt);
    if (command == "rate") return cmd_rate(cfg, opt);
    if (command == "selfcheck") return cmd_selfcheck(cfg, opt);
    raise(ErrorKind::usage, kStage, "unknown command '" + command + "'");
  } catch (const Error& e) {
    err_of(opt) << "convhom: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err_of(opt) << "convhom: internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace convhom
