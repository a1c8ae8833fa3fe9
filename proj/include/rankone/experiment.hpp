#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rankone/entropy_analysis.hpp"
#include "rankone/serialization.hpp"

namespace rankone {

enum ExitCode : int { kExitPass = 0, kExitDomain = 1, kExitConfig = 2, kExitBudget = 3 };

struct RefineConfig {
  int K = 12;
  int towers = 10;
  int perturbed_levels = 3;
  int swaps = 2;
  int depth = 4;
  std::vector<Rational> deltas;  // empty: 2^{-j}
};

struct ExperimentConfig {
  Json schedule_spec;
  std::string schedule_id = "schedule";
  std::optional<int> K;
  int k = 1;
  std::vector<std::optional<std::vector<LatticePoint>>> directions;  // nullopt: the whole space
  std::vector<Rational> m_list{Rational(1)};
  std::optional<std::pair<int, int>> j_range;
  TimeVariant variant = TimeVariant::theorem_main;
  LogBase log_base = LogBase::natural;
  BadTermMode mode = BadTermMode::strict;
  double decay_factor = 0.25;
  double eccentricity_threshold = 1.0;
  Index cell_budget = kDefaultCellBudget;
  Index work_budget = kDefaultNameWorkBudget;
  bool expect_decay = true;
  std::uint64_t seed = 0;
  std::string out_dir = "rankone_out";
  RefineConfig refine;
  std::optional<int> corrupt_level;  // test hook
  std::filesystem::path base_dir;    // for relative schedule files
  std::string canonical;             // compact dump of the config document
  std::string hash;                  // FNV-1a of canonical text and seed

  void rehash();
};

/// Parses a config document. Relative schedule file references resolve
/// against `base_dir`.
ExperimentConfig parse_config(const Json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

ConstructionSchedule build_schedule(const ExperimentConfig& cfg);

struct CliOptions {
  std::string command;
  std::filesystem::path config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

struct RunResult {
  int exit_code = kExitPass;
  Json summary;
};

/// Runs one command end to end; diagnostics go to `err`. Never throws for
/// config, I/O or domain failures: they are mapped to exit codes.
RunResult run_command(const CliOptions& options, std::ostream& err);

}  // namespace rankone
