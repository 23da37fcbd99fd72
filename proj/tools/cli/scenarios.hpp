#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace ucontract::cli {

/// One checked quantity. For upper-bound checks margin = threshold - measured,
/// so a negative margin is a failure. Non-gating entries are reports.
struct Assertion {
  std::string name;
  std::string invariant;
  bool gating = true;
  bool passed = true;
  double measured = 0.0;
  double threshold = 0.0;
  double margin = 0.0;
  std::string witness;
};

struct Artifact {
  std::string name;
  std::string content;
};

struct SeedOutput {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<Artifact> files;
  Json data;
};

struct ScenarioOutcome {
  std::vector<Assertion> assertions;
  std::vector<Artifact> files;
  Json details = Json::object();
};

using Tolerances = std::map<std::string, double>;

SeedOutput run_seed(const ExperimentConfig& config, const Tolerances& tol, std::size_t index, std::uint64_t seed);

/// Merges per-seed outputs (in seed-list order) into assertions and run-level
/// artifacts.
ScenarioOutcome summarize(const ExperimentConfig& config, const Tolerances& tol,
                          const std::vector<SeedOutput>& seeds);

/// Effective t grid: the configured one, or the scenario default.
std::vector<double> effective_t_grid(const ExperimentConfig& config);

/// Upper-bound check helper: passes iff measured <= threshold.
Assertion upper_bound(std::string name, std::string invariant, double measured, double threshold,
                      std::string witness = {});

std::string seed_file_name(std::size_t index, const std::string& suffix = {},
                           const std::string& extension = ".csv");

}  // namespace ucontract::cli
