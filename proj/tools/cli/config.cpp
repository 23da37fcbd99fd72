#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ucontract::cli {

namespace {

const std::vector<std::pair<Scenario, std::string>>& scenario_table() {
  static const std::vector<std::pair<Scenario, std::string>> table = {
      {Scenario::transport_oracle, "transport_oracle"},
      {Scenario::freeconv_validate, "freeconv_validate"},
      {Scenario::lemma31_lipschitz, "lemma31_lipschitz"},
      {Scenario::lemma32_bounds, "lemma32_bounds"},
      {Scenario::contraction_run, "contraction_run"},
      {Scenario::haar_absorption, "haar_absorption"},
      {Scenario::contraction_fact24, "contraction_fact24"},
  };
  return table;
}

const std::map<Scenario, std::map<std::string, double>>& default_tolerances() {
  static const std::map<Scenario, std::map<std::string, double>> table = {
      {Scenario::transport_oracle, {{"exact_vs_brute", 1e-10}, {"closed_form", 1e-8}}},
      {Scenario::freeconv_validate, {{"recursion_vs_sampler", 0.05}}},
      {Scenario::lemma31_lipschitz, {{"lipschitz_slack", 1e-9}}},
      {Scenario::lemma32_bounds, {{"corrected_slack", 0.02}}},
      {Scenario::contraction_run,
       {{"final_norm", 0.2}, {"dist_after_one", 0.15}, {"monotone_slack", 0.05}}},
      {Scenario::haar_absorption, {{"sampled_moment", 0.1}, {"seed_fraction", 0.95}}},
      {Scenario::contraction_fact24, {{"contraction_slack", 0.05}}},
  };
  return table;
}

template <class T>
T get_field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string scenario_name(Scenario s) {
  for (const auto& [v, name] : scenario_table()) {
    if (v == s) return name;
  }
  throw ConfigError("unknown scenario value");
}

Scenario parse_scenario(const std::string& name) {
  for (const auto& [v, n] : scenario_table()) {
    if (n == name) return v;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : scenario_table()) out.push_back(entry.second);
    return out;
  }();
  return names;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {"scenario", "N",         "seeds",         "t_grid", "grid",
                                              "adaptive", "output_dir", "tolerances",   "instances",
                                              "instance_seed", "workers"};
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) throw ConfigError("unknown config field '" + item.key() + "'");
  }
  ExperimentConfig c;
  c.scenario = parse_scenario(get_field<std::string>(j, "scenario"));
  if (j.contains("N")) {
    const auto n = get_field<long long>(j, "N");
    if (n < 2) throw ConfigError("N must be an integer >= 2");
    c.n = static_cast<std::size_t>(n);
  }
  c.seeds = get_field<std::vector<std::uint64_t>>(j, "seeds");
  if (c.seeds.empty()) throw ConfigError("seed list must be nonempty");
  if (j.contains("t_grid")) {
    c.t_grid = get_field<std::vector<double>>(j, "t_grid");
    for (std::size_t i = 0; i < c.t_grid.size(); ++i) {
      if (!std::isfinite(c.t_grid[i]) || c.t_grid[i] < 0.0) throw ConfigError("t_grid values must be finite and >= 0");
      if (i > 0 && c.t_grid[i] <= c.t_grid[i - 1]) throw ConfigError("t_grid must be strictly increasing");
    }
  }
  if (j.contains("grid")) {
    const auto g = get_field<long long>(j, "grid");
    if (g < 1) throw ConfigError("grid must be a positive integer");
    c.grid = static_cast<std::size_t>(g);
  }
  if (j.contains("adaptive")) c.adaptive = get_field<bool>(j, "adaptive");
  if (j.contains("output_dir")) c.output_dir = get_field<std::string>(j, "output_dir");
  if (j.contains("tolerances")) c.tolerances = get_field<std::map<std::string, double>>(j, "tolerances");
  if (j.contains("instances")) {
    const auto k = get_field<long long>(j, "instances");
    if (k < 0) throw ConfigError("instances must be >= 0");
    c.instances = static_cast<std::size_t>(k);
  }
  if (j.contains("instance_seed")) c.instance_seed = get_field<std::uint64_t>(j, "instance_seed");
  if (j.contains("workers")) {
    const auto w = get_field<long long>(j, "workers");
    if (w < 0) throw ConfigError("workers must be >= 0");
    c.workers = static_cast<std::size_t>(w);
  }
  resolved_tolerances(c);
  return c;
}

Json to_json(const ExperimentConfig& c) {
  return {{"scenario", scenario_name(c.scenario)},
          {"N", c.n},
          {"seeds", c.seeds},
          {"t_grid", c.t_grid},
          {"grid", c.grid},
          {"adaptive", c.adaptive},
          {"output_dir", c.output_dir},
          {"tolerances", c.tolerances},
          {"instances", c.instances},
          {"instance_seed", c.instance_seed},
          {"workers", c.workers}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

Json config_schema() {
  Json tolerance_keys = Json::object();
  for (const auto& [s, tols] : default_tolerances()) {
    Json keys = Json::object();
    for (const auto& [k, v] : tols) keys[k] = v;
    tolerance_keys[scenario_name(s)] = keys;
  }
  return {
      {"type", "object"},
      {"additionalProperties", false},
      {"required", {"scenario", "seeds"}},
      {"properties",
       {{"scenario", {{"enum", scenario_names()}}},
        {"N", {{"type", "integer"}, {"minimum", 2}, {"default", 64}, {"description", "matrix dimension"}}},
        {"seeds", {{"type", "array"}, {"items", {{"type", "integer"}, {"minimum", 0}}}, {"minItems", 1}}},
        {"t_grid",
         {{"type", "array"},
          {"items", {{"type", "number"}, {"minimum", 0}}},
          {"description", "strictly increasing homotopy times; empty picks the scenario default"}}},
        {"grid", {{"type", "integer"}, {"minimum", 1}, {"default", 256}, {"description", "Haar reference grid"}}},
        {"adaptive", {{"type", "boolean"}, {"default", false}, {"description", "freeness-checked ladder stages"}}},
        {"output_dir", {{"type", "string"}, {"description", "relative paths resolve under $UCONTRACT_OUT"}}},
        {"tolerances",
         {{"type", "object"},
          {"additionalProperties", {{"type", "number"}}},
          {"description", "overrides of the per-scenario defaults"},
          {"defaults", tolerance_keys}}},
        {"instances", {{"type", "integer"}, {"minimum", 0}, {"description", "random instances per seed; 0 = default"}}},
        {"instance_seed", {{"type", "integer"}, {"minimum", 0}, {"default", 1}}},
        {"workers", {{"type", "integer"}, {"minimum", 0}, {"default", 1}}}}}};
}

std::map<std::string, double> resolved_tolerances(const ExperimentConfig& c) {
  auto tols = default_tolerances().at(c.scenario);
  for (const auto& [k, v] : c.tolerances) {
    auto it = tols.find(k);
    if (it == tols.end()) {
      throw ConfigError("tolerance '" + k + "' does not apply to scenario " + scenario_name(c.scenario));
    }
    if (!std::isfinite(v) || v < 0.0) throw ConfigError("tolerance '" + k + "' must be finite and >= 0");
    it->second = v;
  }
  return tols;
}

}  // namespace ucontract::cli
