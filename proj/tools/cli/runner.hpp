#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "cli/config.hpp"
#include "cli/scenarios.hpp"

namespace ucontract::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "UCONTRACT_OUT";

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<std::size_t> workers;
};

struct RunReport {
  int exit_code = kExitPass;
  std::filesystem::path out_dir;
  ScenarioOutcome outcome;
  double elapsed_seconds = 0.0;
};

/// --out, else output_dir from the config (relative paths under the output
/// root), else <root>/<scenario>. The root is $UCONTRACT_OUT or ./ucontract_out.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config, const std::optional<std::filesystem::path>& out);

ExperimentConfig apply_overrides(ExperimentConfig config, const RunOverrides& overrides);

/// Runs every seed on the worker pool and writes config.json, lineage.json,
/// per-seed artifacts, run-level artifacts and summary.json into out_dir.
/// Throws IoError when out_dir cannot be written.
RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Human-readable assertion table.
void print_summary(const RunReport& report, std::ostream& os);

struct ReplayResult {
  bool identical = true;
  std::string first_difference;
  std::size_t files_compared = 0;
};

/// Byte-compares every CSV of `expected` against `actual`.
ReplayResult compare_csv_dirs(const std::filesystem::path& expected, const std::filesystem::path& actual);

/// Re-executes the run recorded in dir (optionally with overrides) into a
/// scratch directory and byte-compares the CSV outputs.
ReplayResult replay(const std::filesystem::path& dir, const RunOverrides& overrides);

}  // namespace ucontract::cli
