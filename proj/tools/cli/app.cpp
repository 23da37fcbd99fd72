#include "cli/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>

#include "cli/runner.hpp"
#include "ucontract/ucontract.hpp"

namespace ucontract::cli {

namespace fs = std::filesystem;

namespace {

CircleMeasure load_measure(const fs::path& p) {
  try {
    return measure_from_json(Json::parse(read_text(p)));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(p.string() + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

struct W2Args {
  std::string mu, nu, solver = "exact", plan_out;
  bool validate = false;
};

int cmd_w2(const W2Args& a, std::ostream& out) {
  const auto mu = load_measure(a.mu);
  const auto nu = load_measure(a.nu);
  Json result = {{"solver", a.solver}};
  if (a.solver == "exact") {
    const auto r = w2_exact(mu, nu);
    result["distance"] = r.distance;
    if (a.validate) result["plan_error"] = validate_plan(r.plan, mu, nu);
    if (!a.plan_out.empty()) write_text(a.plan_out, to_json(r.plan).dump(2) + "\n");
  } else if (a.solver == "brute") {
    result["distance"] = w2_bruteforce(mu, nu);
  } else {
    const auto r = w2_cyclic(mu, nu, a.validate);
    result["distance"] = r.distance;
    result["shift"] = r.shift;
    if (r.matches_exact) {
      result["matches_exact"] = *r.matches_exact;
      result["exact_distance"] = *r.exact_distance;
    }
  }
  out << result.dump(2) << "\n";
  if (a.validate && result.contains("plan_error") && !result["plan_error"].get<std::string>().empty()) {
    return kExitAssertion;
  }
  return kExitPass;
}

struct FreeconvArgs {
  std::string mu, nu, out_file;
  std::size_t order = 6;
  std::size_t n = 256;
  std::vector<std::uint64_t> seeds = {0};
};

int cmd_freeconv(const FreeconvArgs& a, std::ostream& out) {
  const auto mu = load_measure(a.mu);
  const auto nu = load_measure(a.nu);
  const auto rec = boxtimes_moments(moments(mu, a.order), moments(nu, a.order), a.order);
  std::vector<Complex> mean(a.order + 1, Complex(0.0, 0.0));
  for (auto seed : a.seeds) {
    const auto m = boxtimes_sampled_moments(mu, nu, sample_haar_unitary(a.n, seed), a.order);
    for (std::size_t k = 0; k <= a.order; ++k) mean[k] += m[k];
  }
  std::string csv = "k,m_k_recursion_re,m_k_recursion_im,m_k_sampled_re,m_k_sampled_im,abs_gap\n";
  for (std::size_t k = 1; k <= a.order; ++k) {
    const Complex s = mean[k] / static_cast<double>(a.seeds.size());
    csv += std::to_string(k) + "," + format_double(rec[k].real()) + "," + format_double(rec[k].imag()) + "," +
           format_double(s.real()) + "," + format_double(s.imag()) + "," + format_double(std::abs(rec[k] - s)) + "\n";
  }
  if (a.out_file.empty()) {
    out << csv;
  } else {
    write_text(a.out_file, csv);
  }
  return kExitPass;
}

struct HPathArgs {
  std::size_t n = 64;
  std::uint64_t seed = 0;
  double t = 0.0;
  std::string input, out_file;
  bool composite = false;
};

int cmd_hpath(const HPathArgs& a, std::ostream& out) {
  const auto u = a.input.empty() ? UnitaryMatrix::identity(a.n) : UnitaryMatrix::checked(read_matrix(a.input));
  const auto stages = static_cast<std::size_t>(std::max(1.0, std::ceil(a.t)));
  const auto ladder = build_ladder(u.dim(), stages, a.seed);
  auto h = h_path(ladder, u, a.t);
  Json lineage = {{"op", a.composite ? "composite" : "h_path"},
                  {"N", u.dim()},
                  {"ladder_seed", a.seed},
                  {"stages", stages},
                  {"t", a.t},
                  {"input", a.input.empty() ? Json("identity") : Json(a.input)}};
  if (a.composite) {
    const auto d = w2_to_haar(spectral_measure(h), std::max<std::size_t>(u.dim(), 2)).distance;
    const double s = schedule_s(a.t, d);
    lineage["schedule_s"] = s;
    h = g_deform(h, s);
  }
  write_matrix(a.out_file, h.matrix(), lineage);
  out << "wrote " << a.out_file << " (N=" << u.dim() << ", norm_to_identity=" << format_double(distance_to_identity(h))
      << ")\n";
  return kExitPass;
}

int cmd_haar(std::size_t n, std::uint64_t seed, const std::string& file, std::ostream& out) {
  const auto u = sample_haar_unitary(n, seed);
  write_matrix(file, u.matrix(), {{"op", "haar"}, {"N", n}, {"seed", seed}});
  out << "wrote " << file << "\n";
  return kExitPass;
}

int cmd_matrix_info(const std::string& file, std::size_t grid, const std::string& spectrum_out, std::ostream& out) {
  const Matrix m = read_matrix(file);
  Json info = {{"rows", m.rows()}, {"cols", m.cols()}, {"unitarity_defect", unitarity_defect(m)}};
  try {
    info["lineage"] = read_matrix_lineage(file);
  } catch (const std::exception&) {
    info["lineage"] = nullptr;
  }
  if (m.rows() == m.cols()) {
    const auto u = UnitaryMatrix::checked(m);
    const auto mu = spectral_measure(u);
    info["norm_to_identity"] = distance_to_identity(u);
    info["dist_to_haar"] = w2_to_haar(mu, grid == 0 ? u.dim() : grid).distance;
    if (!spectrum_out.empty()) write_text(spectrum_out, to_json(mu).dump(2) + "\n");
  }
  out << info.dump(2) << "\n";
  return kExitPass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contraction experiments for unitary groups: transport on the circle, free multiplicative "
               "convolution and the two-stage homotopy."};
  app.require_subcommand(0, 1);
  bool print_schema = false;
  app.add_flag("--print-schema", print_schema, "print the JSON schema of the config file");

  RunOverrides run_ov;
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<fs::path> out_dir;
  std::optional<std::size_t> workers;
  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", config_path, "config file (JSON)")->required();
  run->add_option("--seed-override", seed_override, "replace the seed list with this single seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--workers", workers, "worker threads (output does not depend on this)");

  std::string replay_dir;
  auto* rep = app.add_subcommand("replay", "re-run a recorded experiment and byte-compare its CSV outputs");
  rep->add_option("dir", replay_dir, "artifact directory of a previous run")->required();
  rep->add_option("--seed-override", seed_override, "replay with a different seed");
  rep->add_option("--workers", workers, "worker threads");

  W2Args w2;
  auto* w2_cmd = app.add_subcommand("w2", "W2 distance between two measure files");
  w2_cmd->add_option("--mu", w2.mu)->required();
  w2_cmd->add_option("--nu", w2.nu)->required();
  w2_cmd->add_option("--solver", w2.solver)->check(CLI::IsMember({"exact", "brute", "cyclic"}));
  w2_cmd->add_flag("--validate", w2.validate, "validate the plan / cross-check the cyclic path");
  w2_cmd->add_option("--plan-out", w2.plan_out, "write the exact transport plan as JSON");

  FreeconvArgs fc;
  auto* fc_cmd = app.add_subcommand("freeconv", "moments of mu boxtimes nu: recursion vs sampler, as CSV");
  fc_cmd->add_option("--mu", fc.mu)->required();
  fc_cmd->add_option("--nu", fc.nu)->required();
  fc_cmd->add_option("--order", fc.order)->check(CLI::Range(1, 10));
  fc_cmd->add_option("-N,--dim", fc.n)->check(CLI::Range(2, 4096));
  fc_cmd->add_option("--seeds", fc.seeds);
  fc_cmd->add_option("--out", fc.out_file);

  std::size_t haar_n = 64;
  std::uint64_t haar_seed = 0;
  std::string haar_out;
  auto* haar_cmd = app.add_subcommand("haar", "dump a Haar unitary to a matrix container");
  haar_cmd->add_option("-N,--dim", haar_n)->check(CLI::Range(1, 4096));
  haar_cmd->add_option("--seed", haar_seed);
  haar_cmd->add_option("--out", haar_out)->required();

  HPathArgs hp;
  auto* hp_cmd = app.add_subcommand("h-path", "dump h(t, u), or the composite contraction, to a matrix container");
  hp_cmd->add_option("-N,--dim", hp.n)->check(CLI::Range(1, 4096));
  hp_cmd->add_option("--seed", hp.seed, "ladder seed");
  hp_cmd->add_option("--t", hp.t)->check(CLI::NonNegativeNumber);
  hp_cmd->add_option("--input", hp.input, "starting unitary (matrix container); identity if omitted");
  hp_cmd->add_flag("--composite", hp.composite, "apply g_s with the adaptive schedule");
  hp_cmd->add_option("--out", hp.out_file)->required();

  std::string info_file, spectrum_out;
  std::size_t info_grid = 0;
  auto* info_cmd = app.add_subcommand("matrix-info", "restore a matrix container and report its diagnostics");
  info_cmd->add_option("file", info_file)->required();
  info_cmd->add_option("--grid", info_grid, "Haar grid (default N)");
  info_cmd->add_option("--spectrum-out", spectrum_out, "write the spectral measure as JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (print_schema) {
      out << config_schema().dump(2) << "\n";
      return kExitPass;
    }
    run_ov.seed = seed_override;
    run_ov.out = out_dir;
    run_ov.workers = workers;
    if (*run) {
      const auto config = apply_overrides(load_config(config_path), run_ov);
      const auto report = run_experiment(config, resolve_output_dir(config, run_ov.out));
      print_summary(report, out);
      if (report.exit_code != kExitPass) {
        for (const auto& a : report.outcome.assertions) {
          if (a.gating && !a.passed) err << "assertion failed: " << a.name << " [" << a.witness << "]\n";
        }
      }
      return report.exit_code;
    }
    if (*rep) {
      const auto r = replay(replay_dir, run_ov);
      if (r.identical) {
        out << "replay identical (" << r.files_compared << " CSV files)\n";
        return kExitPass;
      }
      err << "replay mismatch: " << r.first_difference << "\n";
      return kExitAssertion;
    }
    if (*w2_cmd) return cmd_w2(w2, out);
    if (*fc_cmd) return cmd_freeconv(fc, out);
    if (*haar_cmd) return cmd_haar(haar_n, haar_seed, haar_out, out);
    if (*hp_cmd) return cmd_hpath(hp, out);
    if (*info_cmd) return cmd_matrix_info(info_file, info_grid, spectrum_out, out);
    out << app.help();
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SizeError& e) {
    err << "size error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitAssertion;
  }
}

}  // namespace ucontract::cli
