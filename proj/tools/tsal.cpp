#include "tsal_cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Safe active learning with closed-form IMSPE acquisitions"};
  app.require_subcommand(1);

  tsal::cli::RunOptions run_opt;
  std::string run_out;
  auto* run = app.add_subcommand("run", "Run a seeded experiment batch from a config file");
  run->add_option("config", run_opt.config_path, "Experiment config (INI)")->required();
  run->add_option("--jobs,-j", run_opt.jobs, "Parallel runs")->check(CLI::PositiveNumber);
  run->add_option("--out,-o", run_out, "Output directory (overrides [output] directory)");

  tsal::cli::ValidateOptions val_opt;
  std::string val_config;
  auto* validate = app.add_subcommand("validate", "Compare closed forms against quadrature");
  validate->add_option("--samples,-n", val_opt.samples, "Random configurations");
  validate->add_option("--seed,-s", val_opt.seed, "RNG seed");
  validate->add_option("--config,-c", val_config, "Validation config (INI, section [validation])");

  std::string mot_out;
  auto* motivating = app.add_subcommand("motivating", "Solve the one-dimensional IMSPE example");
  motivating->add_option("--out,-o", mot_out, "Write the curve CSV to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tsal::cli::kExitUsage;
  }

  try {
    if (*run) {
      if (!run_out.empty()) run_opt.out_dir = run_out;
      return tsal::cli::cmd_run(run_opt, std::cout, std::cerr);
    }
    if (*validate) {
      if (!val_config.empty()) val_opt.config_path = val_config;
      return tsal::cli::cmd_validate(val_opt, std::cout, std::cerr);
    }
    std::optional<std::string> path;
    if (!mot_out.empty()) path = mot_out;
    return tsal::cli::cmd_motivating(path, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tsal::cli::kExitFailure;
  }
}
