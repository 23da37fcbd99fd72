#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ucontract/io.hpp"

namespace ucontract::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario {
  transport_oracle,
  freeconv_validate,
  lemma31_lipschitz,
  lemma32_bounds,
  contraction_run,
  haar_absorption,
  contraction_fact24,
};

std::string scenario_name(Scenario s);
Scenario parse_scenario(const std::string& name);
const std::vector<std::string>& scenario_names();

struct ExperimentConfig {
  Scenario scenario = Scenario::transport_oracle;
  std::size_t n = 64;
  std::vector<std::uint64_t> seeds;
  std::vector<double> t_grid;
  std::size_t grid = 256;
  bool adaptive = false;
  std::string output_dir;
  std::map<std::string, double> tolerances;
  /// Scenario-specific count of random instances per seed; 0 picks the default.
  std::size_t instances = 0;
  /// Seed for inputs shared by every seed of a run (free-convolution pairs).
  std::uint64_t instance_seed = 1;
  /// Worker threads; 0 uses the hardware concurrency. Never affects output.
  std::size_t workers = 1;
};

/// Throws ConfigError on unknown keys, unknown scenarios and invalid values.
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);

ExperimentConfig load_config(const std::filesystem::path& path);

/// JSON schema describing the config file.
Json config_schema();

/// Default tolerances for a scenario, with overrides applied. Unknown
/// override keys are a ConfigError.
std::map<std::string, double> resolved_tolerances(const ExperimentConfig& c);

}  // namespace ucontract::cli
