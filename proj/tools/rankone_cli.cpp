#include <iostream>

#include <CLI11.hpp>

#include "rankone/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Rank-one lattice action experiments"};
  app.require_subcommand(1, 1);

  rankone::CliOptions options;
  std::string out;
  std::uint64_t seed = 0;
  for (const char* name : {"validate", "scan", "bounds", "refine"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", options.config, "JSON config file")->required();
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--seed", seed, "Seed for randomized fixtures");
    sub->add_option("--threads", options.threads, "Worker threads for scans")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : rankone::kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  options.command = sub->get_name();
  if (sub->count("--out")) options.out = out;
  if (sub->count("--seed")) options.seed = seed;

  const rankone::RunResult result = rankone::run_command(options, std::cerr);
  std::cout << result.summary.dump(2) << '\n';
  return result.exit_code;
}
