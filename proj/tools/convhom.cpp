// convhom: effective model, threshold expansion and homogenization-rate
// reports for periodic non-symmetric convolution operators.

#include "convhom/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Homogenization of periodic non-symmetric convolution operators"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  int threads = 0;
  std::uint64_t seed = 0;
  std::string ablate;
  std::string fault;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides config.output)");
    sub->add_option("--threads", threads, "worker threads for the rate sweep")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for the power iteration start vectors");
    sub->add_option("--inject-fault", fault, "test hook")->group("");
  };

  CLI::App* effective = app.add_subcommand("effective", "stationary density, drift and effective matrix");
  CLI::App* threshold = app.add_subcommand("threshold", "threshold approximations and their remainder slopes");
  CLI::App* rate = app.add_subcommand("rate", "fibre-wise resolvent error sweep and rate certificate");
  CLI::App* selfcheck = app.add_subcommand("selfcheck", "cross-module invariant suite");
  for (CLI::App* sub : {effective, threshold, rate, selfcheck}) add_common(sub);
  rate->add_option("--ablate", ablate, "comma-separated ablations: no-drift, no-q0, neither");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  convhom::CommandOptions opt;
  opt.out = out;
  if (threads > 0) opt.threads = threads;
  for (CLI::App* sub : {effective, threshold, rate, selfcheck}) {
    if (sub->count_all() > 0 && sub->count("--seed") > 0) opt.seed = seed;
  }
  opt.inject_fault = fault;
  try {
    opt.ablations = convhom::parse_ablation_list(ablate);
  } catch (const convhom::Error& e) {
    std::cerr << "convhom: " << e.what() << "\n";
    return convhom::exit_code(e.kind());
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return convhom::run_command(command, config, opt);
}
