#include <iostream>

#include <CLI11.hpp>

#include "trusttoken/cli.hpp"

int main(int argc, char** argv) {
  using namespace trusttoken;

  CLI::App app{"TrustToken secure-SoC simulator"};
  app.require_subcommand(1);

  cli::RunOptions run;
  std::string mode;
  std::uint64_t seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario file and write report.json + events.log");
  run_cmd->add_option("--config", run.config, "Scenario file")->required();
  run_cmd->add_option("--mode", mode, "Override mode")
      ->check(CLI::IsMember({"trusttoken", "trustzone-baseline"}));
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override master seed");
  run_cmd->add_option("--out", run.out, "Output directory")->required();

  cli::PufEvalOptions eval;
  auto* eval_cmd = app.add_subcommand("puf-eval", "Characterize a simulated PUF population");
  eval_cmd->add_option("--chips", eval.chips, "Number of chips")->required();
  eval_cmd->add_option("--challenges", eval.challenges, "Challenges per chip")->required();
  eval_cmd->add_option("--seed", eval.seed, "Master seed")->required();
  eval_cmd->add_option("--out", eval.out, "Output directory")->required();
  eval_cmd->add_option("--measurements", eval.measurements, "Remeasurements for reliability")
      ->capture_default_str();
  eval_cmd->add_option("--noise-ratio", eval.noise_ratio,
                       "Measurement noise sigma as a fraction of process variation sigma")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfigError;
  }

  if (*run_cmd) {
    if (!mode.empty()) run.mode = sim::parse_mode(mode);
    if (*seed_opt) run.seed = seed;
    return cli::cmd_run(run, std::cout, std::cerr);
  }
  return cli::cmd_puf_eval(eval, std::cout, std::cerr);
}
