#include "cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <sstream>
#include <thread>
#include <vector>

namespace ucontract::cli {

namespace fs = std::filesystem;

namespace {

fs::path output_root() {
  if (const char* env = std::getenv(kOutputRootEnv); env != nullptr && *env != '\0') return fs::path(env);
  return fs::path("ucontract_out");
}

std::vector<SeedOutput> run_seeds(const ExperimentConfig& config, const Tolerances& tol) {
  const std::size_t count = config.seeds.size();
  std::vector<SeedOutput> outputs(count);
  std::vector<std::exception_ptr> errors(count);
  std::size_t workers = config.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.workers;
  workers = std::min(workers, count);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        outputs[i] = run_seed(config, tol, i, config.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outputs;
}

Json assertion_json(const Assertion& a) {
  return {{"name", a.name},     {"invariant", a.invariant}, {"gating", a.gating},
          {"passed", a.passed}, {"measured", a.measured},   {"threshold", a.threshold},
          {"margin", a.margin}, {"witness", a.witness}};
}

std::vector<std::string> csv_files(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

fs::path resolve_output_dir(const ExperimentConfig& config, const std::optional<fs::path>& out) {
  if (out) return *out;
  if (!config.output_dir.empty()) {
    const fs::path p(config.output_dir);
    return p.is_absolute() ? p : output_root() / p;
  }
  return output_root() / scenario_name(config.scenario);
}

ExperimentConfig apply_overrides(ExperimentConfig config, const RunOverrides& overrides) {
  if (overrides.seed) config.seeds = {*overrides.seed};
  if (overrides.workers) config.workers = *overrides.workers;
  return config;
}

RunReport run_experiment(const ExperimentConfig& config, const fs::path& out_dir) {
  if (config.seeds.empty()) throw ConfigError("seed list must be nonempty");
  const auto tol = resolved_tolerances(config);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.out_dir = out_dir;
  write_text(out_dir / "config.json", to_json(config).dump(2) + "\n");

  Json lineage = Json::array();
  for (std::size_t i = 0; i < config.seeds.size(); ++i) {
    lineage.push_back({{"index", i}, {"seed", config.seeds[i]}, {"files_prefix", seed_file_name(i, {}, "")}});
  }
  write_text(out_dir / "lineage.json",
             Json{{"scenario", scenario_name(config.scenario)}, {"instance_seed", config.instance_seed}, {"seeds", lineage}}
                     .dump(2) +
                 "\n");

  const auto seeds = run_seeds(config, tol);
  report.outcome = summarize(config, tol, seeds);

  // Single writer: all files are written here, in seed order.
  for (const auto& s : seeds) {
    for (const auto& f : s.files) write_text(out_dir / f.name, f.content);
  }
  for (const auto& f : report.outcome.files) write_text(out_dir / f.name, f.content);

  report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool pass = true;
  Json assertions = Json::array();
  for (const auto& a : report.outcome.assertions) {
    assertions.push_back(assertion_json(a));
    if (a.gating && !a.passed) pass = false;
  }
  report.exit_code = pass ? kExitPass : kExitAssertion;
  const Json summary = {{"scenario", scenario_name(config.scenario)},
                        {"passed", pass},
                        {"assertions", assertions},
                        {"details", report.outcome.details},
                        {"csv_files", csv_files(out_dir)},
                        {"elapsed_seconds", report.elapsed_seconds}};
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  return report;
}

void print_summary(const RunReport& report, std::ostream& os) {
  for (const auto& a : report.outcome.assertions) {
    const char* status = !a.gating ? "INFO" : (a.passed ? "PASS" : "FAIL");
    os << status << "  " << a.name << "  measured=" << format_double(a.measured);
    if (a.gating) os << " threshold=" << format_double(a.threshold) << " margin=" << format_double(a.margin);
    if (!a.witness.empty()) os << "  [" << a.witness << "]";
    os << "\n";
  }
  os << "artifacts: " << report.out_dir.string() << "\n";
}

ReplayResult compare_csv_dirs(const fs::path& expected, const fs::path& actual) {
  ReplayResult r;
  const auto want = csv_files(expected);
  const auto got = csv_files(actual);
  for (const auto& name : want) {
    if (!fs::exists(actual / name)) {
      r.identical = false;
      r.first_difference = name + ": missing from the replay";
      return r;
    }
    ++r.files_compared;
    const auto a = split_lines(read_text(expected / name));
    const auto b = split_lines(read_text(actual / name));
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
      const std::string ea = i < a.size() ? a[i] : "<end of file>";
      const std::string eb = i < b.size() ? b[i] : "<end of file>";
      if (ea != eb) {
        r.identical = false;
        r.first_difference = name + " row " + std::to_string(i) + ": expected '" + ea + "' got '" + eb + "'";
        return r;
      }
    }
    if (read_text(expected / name) != read_text(actual / name)) {
      r.identical = false;
      r.first_difference = name + ": line endings differ";
      return r;
    }
  }
  for (const auto& name : got) {
    if (!std::binary_search(want.begin(), want.end(), name)) {
      r.identical = false;
      r.first_difference = name + ": produced by the replay but absent from the original run";
      return r;
    }
  }
  return r;
}

ReplayResult replay(const fs::path& dir, const RunOverrides& overrides) {
  if (!fs::exists(dir / "config.json")) throw IoError(dir.string() + " does not contain config.json");
  const auto config = apply_overrides(load_config(dir / "config.json"), overrides);
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  const fs::path scratch = fs::temp_directory_path() / ("ucontract_replay_" + std::to_string(stamp));
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{scratch};
  run_experiment(config, scratch);
  return compare_csv_dirs(dir, scratch);
}

}  // namespace ucontract::cli
