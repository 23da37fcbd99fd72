#include "cli/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cli/svg.hpp"
#include "ucontract/ucontract.hpp"

namespace ucontract::cli {

namespace {

using detail::require;

constexpr std::uint64_t op(StreamOp o) { return static_cast<std::uint64_t>(o); }

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string row;
  for (const auto& c : cells) {
    if (!row.empty()) row += ",";
    row += c;
  }
  return row + "\n";
}

std::string fd(double x) { return format_double(x); }
std::string fu(std::size_t x) { return std::to_string(x); }

std::size_t instances_or(const ExperimentConfig& c, std::size_t fallback) {
  return c.instances == 0 ? fallback : c.instances;
}

std::string seed_witness(const SeedOutput& s) {
  return "seed index " + std::to_string(s.index) + " (seed " + std::to_string(s.seed) + ")";
}

/// Lower-bound check: passes iff measured >= threshold.
Assertion lower_bound(std::string name, std::string invariant, double measured, double threshold,
                      std::string witness = {}) {
  Assertion a;
  a.name = std::move(name);
  a.invariant = std::move(invariant);
  a.measured = measured;
  a.threshold = threshold;
  a.margin = measured - threshold;
  a.passed = measured >= threshold;
  a.witness = std::move(witness);
  return a;
}

Assertion report(std::string name, std::string invariant, double measured, std::string witness = {}) {
  Assertion a;
  a.name = std::move(name);
  a.invariant = std::move(invariant);
  a.gating = false;
  a.measured = measured;
  a.witness = std::move(witness);
  return a;
}

// ---- transport_oracle -------------------------------------------------------

SeedOutput transport_seed(const ExperimentConfig& c, std::size_t index, std::uint64_t seed) {
  SeedOutput out{index, seed, {}, Json::object()};
  auto rng = make_rng(seed, {op(StreamOp::instance)});
  std::uniform_int_distribution<std::size_t> atoms(1, 7);
  const std::size_t count = instances_or(c, 200);

  std::string oracle = "instance,n,exact,brute,cyclic,abs_gap,cyclic_agrees\n";
  double max_gap = 0.0;
  std::size_t worst = 0;
  Json disagreements = Json::array();
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = atoms(rng);
    const auto mu = random_uniform_measure(rng, n);
    const auto nu = random_uniform_measure(rng, n);
    const double exact = w2_exact(mu, nu).distance;
    const double brute = w2_bruteforce(mu, nu);
    const auto cyc = w2_cyclic(mu, nu, true);
    const double gap = std::abs(exact - brute);
    if (gap > max_gap || i == 0) max_gap = gap, worst = i;
    const bool agrees = cyc.matches_exact.value_or(false);
    if (!agrees) {
      disagreements.push_back({{"seed", seed},
                               {"instance", i},
                               {"exact", exact},
                               {"cyclic", cyc.distance},
                               {"shift", cyc.shift},
                               {"mu", to_json(mu)},
                               {"nu", to_json(nu)}});
    }
    oracle += csv_row({fu(i), fu(mu.size()), fd(exact), fd(brute), fd(cyc.distance), fd(gap), agrees ? "1" : "0"});
  }

  std::string closed = "kind,index,closed_form,reference,abs_gap\n";
  double measure_gap = 0.0, unitary_gap = 0.0;
  const std::size_t closed_count = std::max<std::size_t>(1, count / 2);
  for (std::size_t i = 0; i < closed_count; ++i) {
    const auto mu = random_measure(rng, 8, false);
    const double a = w2_to_delta1(mu);
    const double b = w2_exact(mu, CircleMeasure::dirac(0.0)).distance;
    measure_gap = std::max(measure_gap, std::abs(a - b));
    closed += csv_row({"measure", fu(i), fd(a), fd(b), fd(std::abs(a - b))});
  }
  for (std::size_t i = 0; i < closed_count; ++i) {
    const std::uint64_t s = derive_seed(seed, {op(StreamOp::unitary), i});
    const auto u = i % 2 == 0 ? sample_haar_unitary(c.n, s) : unitary_with_measure(random_measure(rng, 6, false), c.n, s);
    const double a = w2_to_delta1(spectral_measure(u));
    const double b = distance_to_identity(u);
    unitary_gap = std::max(unitary_gap, std::abs(a - b));
    closed += csv_row({"unitary", fu(i), fd(a), fd(b), fd(std::abs(a - b))});
  }

  out.files.push_back({seed_file_name(index), oracle});
  out.files.push_back({seed_file_name(index, "closed_form"), closed});
  out.data = {{"max_gap", max_gap},
              {"worst_instance", worst},
              {"instances", count},
              {"disagreements", disagreements},
              {"measure_gap", measure_gap},
              {"unitary_gap", unitary_gap}};
  return out;
}

ScenarioOutcome transport_summary(const Tolerances& tol, const std::vector<SeedOutput>& seeds) {
  ScenarioOutcome out;
  double max_gap = -1.0, measure_gap = -1.0, unitary_gap = -1.0;
  std::string gap_witness, measure_witness, unitary_witness;
  Json disagreements = Json::array();
  std::size_t total = 0;
  for (const auto& s : seeds) {
    const double g = s.data.at("max_gap").get<double>();
    if (g > max_gap) {
      max_gap = g;
      gap_witness = seed_witness(s) + " instance " + std::to_string(s.data.at("worst_instance").get<std::size_t>());
    }
    if (s.data.at("measure_gap").get<double>() > measure_gap) {
      measure_gap = s.data.at("measure_gap").get<double>();
      measure_witness = seed_witness(s);
    }
    if (s.data.at("unitary_gap").get<double>() > unitary_gap) {
      unitary_gap = s.data.at("unitary_gap").get<double>();
      unitary_witness = seed_witness(s);
    }
    for (const auto& d : s.data.at("disagreements")) disagreements.push_back(d);
    total += s.data.at("instances").get<std::size_t>();
  }
  out.assertions.push_back(upper_bound("exact_vs_brute", "transport: exact assignment equals brute-force optimum",
                                       max_gap, tol.at("exact_vs_brute"), gap_witness));
  out.assertions.push_back(report("cyclic_disagreements",
                                  "transport: cyclic-shift coupling compared with the exact optimum; every "
                                  "disagreement is listed with its witness in details.cyclic_disagreements",
                                  static_cast<double>(disagreements.size())));
  out.assertions.push_back(upper_bound("closed_form_delta1_measure",
                                       "transport: w2_to_delta1(mu) equals w2_exact(mu, delta_1)", measure_gap,
                                       tol.at("closed_form"), measure_witness));
  out.assertions.push_back(upper_bound("closed_form_delta1_unitary",
                                       "transport/matrix_model: two_norm(U - I) equals w2_to_delta1(mu_U)",
                                       unitary_gap, tol.at("closed_form"), unitary_witness));
  out.details = {{"instances", total}, {"cyclic_disagreements", disagreements}};
  return out;
}

// ---- freeconv_validate ------------------------------------------------------

constexpr std::size_t kFreeconvOrder = 6;
constexpr std::size_t kBernoulliOrder = 8;
constexpr std::size_t kLatticeDenominator = 64;

std::pair<CircleMeasure, CircleMeasure> freeconv_pair(const ExperimentConfig& c, std::size_t p) {
  auto rng = make_rng(c.instance_seed, {op(StreamOp::instance), p});
  auto mu = random_lattice_measure(rng, 6, kLatticeDenominator);
  auto nu = random_lattice_measure(rng, 6, kLatticeDenominator);
  return {std::move(mu), std::move(nu)};
}

SeedOutput freeconv_seed(const ExperimentConfig& c, std::size_t index, std::uint64_t seed) {
  SeedOutput out{index, seed, {}, Json::object()};
  const std::size_t pairs = instances_or(c, 10);
  const auto q = sample_haar_unitary(c.n, derive_seed(seed, {op(StreamOp::conjugator)}));
  std::string csv = "pair,k,m_k_sampled_re,m_k_sampled_im\n";
  Json moments_json = Json::array();
  for (std::size_t p = 0; p < pairs; ++p) {
    const auto [mu, nu] = freeconv_pair(c, p);
    const auto m = boxtimes_sampled_moments(mu, nu, q, kFreeconvOrder);
    Json row = Json::array();
    for (std::size_t k = 1; k <= kFreeconvOrder; ++k) {
      csv += csv_row({fu(p), fu(k), fd(m[k].real()), fd(m[k].imag())});
      row.push_back({m[k].real(), m[k].imag()});
    }
    moments_json.push_back(row);
  }
  out.files.push_back({seed_file_name(index), csv});
  out.data = {{"moments", moments_json}};
  return out;
}

ScenarioOutcome freeconv_summary(const ExperimentConfig& c, const Tolerances& tol,
                                 const std::vector<SeedOutput>& seeds) {
  ScenarioOutcome out;
  const std::size_t pairs = instances_or(c, 10);
  std::string csv = "pair,k,m_k_recursion_re,m_k_recursion_im,m_k_sampled_re,m_k_sampled_im,abs_gap\n";
  double max_gap = 0.0;
  std::string witness;
  for (std::size_t p = 0; p < pairs; ++p) {
    const auto [mu, nu] = freeconv_pair(c, p);
    const auto rec = boxtimes_moments(moments(mu, kFreeconvOrder), moments(nu, kFreeconvOrder), kFreeconvOrder);
    for (std::size_t k = 1; k <= kFreeconvOrder; ++k) {
      Complex mean(0.0, 0.0);
      for (const auto& s : seeds) {
        const auto& v = s.data.at("moments").at(p).at(k - 1);
        mean += Complex(v.at(0).get<double>(), v.at(1).get<double>());
      }
      mean /= static_cast<double>(seeds.size());
      const double gap = std::abs(rec[k] - mean);
      if (gap > max_gap) {
        max_gap = gap;
        witness = "pair " + std::to_string(p) + " k=" + std::to_string(k);
      }
      csv += csv_row({fu(p), fu(k), fd(rec[k].real()), fd(rec[k].imag()), fd(mean.real()), fd(mean.imag()), fd(gap)});
    }
  }
  out.files.push_back({"freeconv.csv", csv});
  out.assertions.push_back(upper_bound("recursion_vs_sampler",
                                       "free_conv: |m_k(recursion) - mean m_k(sampled)| for k <= 6", max_gap,
                                       tol.at("recursion_vs_sampler"), witness));

  const auto b = moments(CircleMeasure({{0.0, 0.5}, {0.5, 0.5}}), kBernoulliOrder);
  const auto bb = boxtimes_moments(b, b, kBernoulliOrder);
  double worst = 0.0;
  for (std::size_t k = 1; k <= kBernoulliOrder; ++k) worst = std::max({worst, std::abs(bb[k].real()), std::abs(bb[k].imag())});
  out.assertions.push_back(upper_bound("bernoulli_square_exact_zero",
                                       "free_conv: Bernoulli boxtimes Bernoulli moments are exactly 0 for k = 1..8",
                                       worst, 0.0));
  out.details = {{"pairs", pairs}, {"seeds", seeds.size()}, {"order", kFreeconvOrder}};
  return out;
}

// ---- haar_absorption --------------------------------------------------------

constexpr std::size_t kAbsorptionOrder = 6;
constexpr std::size_t kExactAbsorptionOrder = 10;

SeedOutput absorption_seed(const ExperimentConfig& c, std::size_t index, std::uint64_t seed) {
  SeedOutput out{index, seed, {}, Json::object()};
  auto rng = make_rng(seed, {op(StreamOp::measure)});
  const auto mu = random_measure(rng, 6, false);

  const auto zero = MomentSequence(std::vector<Complex>(kExactAbsorptionOrder + 1, Complex(0.0, 0.0)));
  const auto mm = moments(mu, kExactAbsorptionOrder);
  double exact_worst = 0.0;
  for (const auto& r : {boxtimes_moments(mm, zero, kExactAbsorptionOrder), boxtimes_moments(zero, mm, kExactAbsorptionOrder)}) {
    for (std::size_t k = 1; k <= kExactAbsorptionOrder; ++k) {
      exact_worst = std::max({exact_worst, std::abs(r[k].real()), std::abs(r[k].imag())});
    }
  }

  const auto sampled = boxtimes_sampled(mu, haar_discretization(c.n), c.n, derive_seed(seed, {op(StreamOp::conjugator)}));
  const auto m = moments(sampled, kAbsorptionOrder);
  std::string csv = "k,m_k_re,m_k_im,abs\n";
  double worst = 0.0;
  for (std::size_t k = 1; k <= kAbsorptionOrder; ++k) {
    worst = std::max(worst, std::abs(m[k]));
    csv += csv_row({fu(k), fd(m[k].real()), fd(m[k].imag()), fd(std::abs(m[k]))});
  }
  out.files.push_back({seed_file_name(index), csv});
  out.data = {{"sampled_max", worst}, {"exact_max", exact_worst}};
  return out;
}

ScenarioOutcome absorption_summary(const Tolerances& tol, const std::vector<SeedOutput>& seeds) {
  ScenarioOutcome out;
  double exact_worst = 0.0;
  std::size_t good = 0;
  double sampled_worst = 0.0;
  std::string worst_seed;
  Json failing = Json::array();
  for (const auto& s : seeds) {
    exact_worst = std::max(exact_worst, s.data.at("exact_max").get<double>());
    const double m = s.data.at("sampled_max").get<double>();
    if (m <= tol.at("sampled_moment")) {
      ++good;
    } else {
      failing.push_back(seed_witness(s));
    }
    if (m >= sampled_worst) sampled_worst = m, worst_seed = seed_witness(s);
  }
  out.assertions.push_back(upper_bound("exact_absorption",
                                       "free_conv: boxtimes with all-zero moments gives exactly 0 for k = 1..10",
                                       exact_worst, 0.0));
  const double fraction = static_cast<double>(good) / static_cast<double>(seeds.size());
  out.assertions.push_back(lower_bound("sampled_absorption_fraction",
                                       "free_conv: fraction of seeds with |m_k(sampled)| <= tolerance for k <= 6",
                                       fraction, tol.at("seed_fraction"), "worst " + worst_seed));
  out.details = {{"worst_sampled_moment", sampled_worst}, {"seeds_over_tolerance", failing}};
  return out;
}

// ---- contraction_fact24 -----------------------------------------------------

SeedOutput fact24_seed(const ExperimentConfig& c, std::size_t index, std::uint64_t seed) {
  SeedOutput out{index, seed, {}, Json::object()};
  auto rng = make_rng(seed, {op(StreamOp::measure)});
  const auto mu1 = random_lattice_measure(rng, 6, kLatticeDenominator);
  const auto mu2 = random_lattice_measure(rng, 6, kLatticeDenominator);
  const auto nu = random_lattice_measure(rng, 6, kLatticeDenominator);
  const auto r = w2_contraction_check(mu1, mu2, nu, c.n, derive_seed(seed, {op(StreamOp::conjugator)}));
  std::string csv = "lhs,rhs,paired_input_distance,lhs_minus_rhs\n";
  csv += csv_row({fd(r.lhs), fd(r.rhs), fd(r.paired_input_distance), fd(r.lhs - r.rhs)});
  out.files.push_back({seed_file_name(index), csv});
  out.data = {{"lhs", r.lhs}, {"rhs", r.rhs}, {"paired", r.paired_input_distance}};
  return out;
}

ScenarioOutcome fact24_summary(const Tolerances& tol, const std::vector<SeedOutput>& seeds) {
  ScenarioOutcome out;
  double excess = -std::numeric_limits<double>::infinity();
  double hw = -std::numeric_limits<double>::infinity();
  std::string witness, hw_witness;
  for (const auto& s : seeds) {
    const double lhs = s.data.at("lhs").get<double>();
    const double e = lhs - s.data.at("rhs").get<double>();
    if (e > excess) excess = e, witness = seed_witness(s);
    const double h = lhs - s.data.at("paired").get<double>();
    if (h > hw) hw = h, hw_witness = seed_witness(s);
  }
  out.assertions.push_back(upper_bound("contraction",
                                       "free_conv: W2(mu1 boxtimes nu, mu2 boxtimes nu) - W2(mu1, mu2) <= slack",
                                       excess, tol.at("contraction_slack"), witness));
  out.assertions.push_back(upper_bound("paired_input_bound",
                                       "matrix_model: spectral W2 of the products <= two_norm of the paired inputs",
                                       hw, 1e-9, hw_witness));
  return out;
}

// ---- lemma31_lipschitz ------------------------------------------------------

SeedOutput lipschitz_seed(const ExperimentConfig& c, std::size_t index, std::uint64_t seed) {
  SeedOutput out{index, seed, {}, Json::object()};
  const auto grid = effective_t_grid(c);
  const double horizon = grid.back();
  const auto stages = static_cast<std::size_t>(std::max(1.0, std::ceil(horizon)));
  const auto ladder = build_ladder(c.n, stages, seed);
  auto rng = make_rng(seed, {op(StreamOp::instance)});
  std::uniform_real_distribution<double> time(0.0, horizon);
  std::uniform_real_distribution<double> small(0.0, 0.05);
  const std::size_t count = instances_or(c, 50);

  std::string csv = "sample,t,s,lhs,rhs,lhs_minus_rhs\n";
  double excess = -std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = time(rng);
    double s = time(rng);
    const auto u = sample_haar_unitary(c.n, derive_seed(seed, {op(StreamOp::unitary), i, 0}));
    UnitaryMatrix v = u;
    switch (i % 3) {
      case 0:
        v = sample_haar_unitary(c.n, derive_seed(seed, {op(StreamOp::unitary), i, 1}));
        break;
      case 1: {
        // Nearby input: u e^{i pi eps X}.
        const auto x = principal_log_generator(sample_haar_unitary(c.n, derive_seed(seed, {op(StreamOp::unitary), i, 1})));
        v = u * x.exp_i_pi(small(rng));
        break;
      }
      default:
        s = std::clamp(t + small(rng) - 0.025, 0.0, horizon);
    }
    const double lhs = two_norm(h_path(ladder, u, t).matrix() - h_path(ladder, v, s).matrix());
    const double rhs = std::numbers::pi * std::abs(t - s) + two_norm(u.matrix() - v.matrix());
    if (lhs - rhs > excess) excess = lhs - rhs, worst = i;
    csv += csv_row({fu(i), fd(t), fd(s), fd(lhs), fd(rhs), fd(lhs - rhs)});
  }
  out.files.push_back({seed_file_name(index), csv});
  out.data = {{"excess", excess}, {"worst_sample", worst}, {"samples", count}};
  return out;
}

ScenarioOutcome lipschitz_summary(const Tolerances& tol, const std::vector<SeedOutput>& seeds) {
  ScenarioOutcome out;
  double excess = -std::numeric_limits<double>::infinity();
  std::string witness;
  std::size_t total = 0;
  for (const auto& s : seeds) {
    total += s.data.at("samples").get<std::size_t>();
    if (s.data.at("excess").get<double>() > excess) {
      excess = s.data.at("excess").get<double>();
      witness = seed_witness(s) + " sample " + std::to_string(s.data.at("worst_sample").get<std::size_t>());
    }
  }
  out.assertions.push_back(upper_bound("lipschitz",
                                       "homotopy: two_norm(h(t,u) - h(s,v)) - pi|t-s| - two_norm(u-v) <= slack",
                                       excess, tol.at("lipschitz_slack"), witness));
  out.details = {{"samples", total}};
  return out;
}

// ---- lemma32_bounds ---------------------------------------------------------

UnitaryMatrix lemma32_input(const ExperimentConfig& c, std::uint64_t seed, std::string& kind) {
  const std::uint64_t s = derive_seed(seed, {op(StreamOp::unitary)});
  auto rng = make_rng(seed, {op(StreamOp::measure)});
  switch (seed % 4) {
    case 0:
      kind = "haar_sample";
      return sample_haar_unitary(c.n, s);
    case 1:
      kind = "haar_spectrum";
      return unitary_with_spectrum(haar_discretization(c.n).angles(), s);
    case 2: {
      kind = "four_point";
      std::vector<Atom> atoms;
      std::uniform_real_distribution<double> w(0.05, 1.0);
      for (int i = 0; i < 4; ++i) atoms.push_back({uniform_angle(rng), w(rng)});
      return unitary_with_measure(CircleMeasure::normalized(std::move(atoms)), c.n, s);
    }
    default:
      kind = "random_measure";
      return unitary_with_measure(random_measure(rng, 6, false), c.n, s);
  }
}

SeedOutput lemma32_seed(const ExperimentConfig& c, std::size_t index, std::uint64_t seed) {
  SeedOutput out{index, seed, {}, Json::object()};
  std::string kind;
  const auto u = lemma32_input(c, seed, kind);
  std::string csv = "t,lhs,dist_to_haar,rhs_stated,rhs_corrected,stated_holds,corrected_holds\n";
  Json rows = Json::array();
  const auto eig = unitary_eigen(u);
  const double d = spectral_dist_to_haar(eig, c.grid);
  for (double t : effective_t_grid(c)) {
    const auto b = lemma32_bound(u, eig, d, t);
    const bool stated = b.lhs <= b.rhs_stated;
    const bool corrected = b.lhs <= b.rhs_corrected;
    csv += csv_row({fd(t), fd(b.lhs), fd(b.dist_to_haar), fd(b.rhs_stated), fd(b.rhs_corrected), stated ? "1" : "0",
                    corrected ? "1" : "0"});
    rows.push_back({{"t", t}, {"lhs", b.lhs}, {"d", b.dist_to_haar}, {"rhs_stated", b.rhs_stated}, {"rhs_corrected", b.rhs_corrected}});
  }
  out.files.push_back({seed_file_name(index), csv});
  out.data = {{"kind", kind}, {"rows", rows}};
  return out;
}

ScenarioOutcome lemma32_summary(const ExperimentConfig& c, const Tolerances& tol,
                                const std::vector<SeedOutput>& seeds) {
  ScenarioOutcome out;
  double excess = -std::numeric_limits<double>::infinity();
  std::string witness;
  Json violations = Json::array();
  std::map<double, std::pair<std::size_t, std::size_t>> table;  // t -> (holds, violated)
  for (const auto& s : seeds) {
    for (const auto& r : s.data.at("rows")) {
      const double t = r.at("t").get<double>();
      const double lhs = r.at("lhs").get<double>();
      const double e = lhs - r.at("rhs_corrected").get<double>();
      if (e > excess) excess = e, witness = seed_witness(s) + " t=" + format_double(t);
      auto& cell = table[t];
      if (lhs <= r.at("rhs_stated").get<double>()) {
        ++cell.first;
      } else {
        ++cell.second;
        violations.push_back({{"seed", s.seed},
                              {"index", s.index},
                              {"kind", s.data.at("kind")},
                              {"t", t},
                              {"lhs", lhs},
                              {"dist_to_haar", r.at("d")},
                              {"rhs_stated", r.at("rhs_stated")}});
      }
    }
  }
  out.assertions.push_back(upper_bound("corrected_bound",
                                       "homotopy: ||g_t(u) - 1||_2 - (2t+1) d - pi/sqrt(2t+3) <= slack", excess,
                                       tol.at("corrected_slack"), witness));
  out.assertions.push_back(report("stated_tail_violations",
                                  "homotopy: pairs (input, t) violating (2t+1) d + sqrt(pi/(2(t+1))); listed in "
                                  "details.stated_tail_violations",
                                  static_cast<double>(violations.size())));
  Json tj = Json::array();
  std::string csv = "t,stated_holds,stated_violated\n";
  for (const auto& [t, cell] : table) {
    tj.push_back({{"t", t}, {"holds", cell.first}, {"violated", cell.second}});
    csv += csv_row({fd(t), fu(cell.first), fu(cell.second)});
  }
  out.files.push_back({"stated_tail_table.csv", csv});
  out.details = {{"stated_tail_table", tj}, {"stated_tail_violations", violations}, {"grid", c.grid}};
  return out;
}

// ---- contraction_run --------------------------------------------------------

struct Start {
  std::string label;
  UnitaryMatrix u;
};

std::vector<Start> contraction_starts(const ExperimentConfig& c, std::uint64_t seed) {
  std::vector<Start> starts;
  starts.push_back({"identity", UnitaryMatrix::identity(c.n)});
  starts.push_back({"minus_identity", UnitaryMatrix::scalar(c.n, 0.5)});
  std::vector<double> clusters(c.n);
  for (std::size_t i = 0; i < c.n; ++i) clusters[i] = i < c.n / 2 ? 0.2 : -0.3;
  starts.push_back({"two_cluster", UnitaryMatrix::diagonal(clusters)});
  auto rng = make_rng(seed, {op(StreamOp::measure)});
  std::vector<Atom> atoms;
  std::uniform_real_distribution<double> w(0.05, 1.0);
  for (int i = 0; i < 4; ++i) atoms.push_back({uniform_angle(rng), w(rng)});
  starts.push_back({"four_point", unitary_with_measure(CircleMeasure::normalized(std::move(atoms)), c.n,
                                                       derive_seed(seed, {op(StreamOp::unitary)}))});
  return starts;
}

SeedOutput contraction_seed(const ExperimentConfig& c, std::size_t index, std::uint64_t seed) {
  SeedOutput out{index, seed, {}, Json::object()};
  const auto grid = effective_t_grid(c);
  const auto stages = static_cast<std::size_t>(std::max(1.0, std::ceil(grid.back())));
  const auto starts = contraction_starts(c, seed);
  AdaptiveOptions opts;
  if (c.adaptive) {
    for (const auto& s : starts) opts.probes.push_back(s.u);
  }
  const auto ladder = build_ladder(c.n, stages, seed, c.adaptive ? &opts : nullptr);

  Json per_start = Json::array();
  std::vector<PlotSeries> series;
  for (const auto& start : starts) {
    const auto trace = contract(ladder, start.u, grid, c.grid, start.label);
    out.files.push_back({seed_file_name(index, start.label), trace_csv(trace)});
    out.files.push_back({seed_file_name(index, start.label, ".json"), to_json(trace).dump(2) + "\n"});

    double dist_after_one = 0.0;
    double dist_rise = 0.0;
    double norm_rise = 0.0;
    double running_min_d = std::numeric_limits<double>::infinity();
    double running_min_n = std::numeric_limits<double>::infinity();
    PlotSeries norm{start.label + " norm", {}, {}, false};
    PlotSeries dist{start.label + " d_W", {}, {}, true};
    for (const auto& s : trace.samples) {
      if (s.t >= 1.0) {
        dist_after_one = std::max(dist_after_one, s.dist_to_haar);
        norm_rise = std::max(norm_rise, s.norm_to_identity - running_min_n);
        running_min_n = std::min(running_min_n, s.norm_to_identity);
      }
      dist_rise = std::max(dist_rise, s.dist_to_haar - running_min_d);
      running_min_d = std::min(running_min_d, s.dist_to_haar);
      norm.x.push_back(s.t), norm.y.push_back(s.norm_to_identity);
      dist.x.push_back(s.t), dist.y.push_back(s.dist_to_haar);
    }
    series.push_back(std::move(norm));
    series.push_back(std::move(dist));
    const auto& last = trace.samples.back();
    per_start.push_back({{"label", start.label},
                         {"t_end", last.t},
                         {"final_norm", last.norm_to_identity},
                         {"dist_after_one", dist_after_one},
                         {"dist_rise", dist_rise},
                         {"norm_rise_after_one", norm_rise}});
  }
  Json reports = Json::array();
  for (const auto& r : ladder.reports()) reports.push_back({{"attempts", r.attempts}, {"defect", r.defect}, {"accepted", r.accepted}});
  out.files.push_back({seed_file_name(index, {}, ".svg"),
                       line_plot("contraction, N=" + std::to_string(c.n) + ", seed " + std::to_string(seed), "t",
                                 "norm_to_identity (solid), dist_to_haar (dashed)", series)});
  out.data = {{"starts", per_start}, {"ladder", reports}};
  return out;
}

ScenarioOutcome contraction_summary(const Tolerances& tol, const std::vector<SeedOutput>& seeds) {
  ScenarioOutcome out;
  struct Worst {
    double value = -std::numeric_limits<double>::infinity();
    std::string witness;
    void update(double v, std::string w) {
      if (v > value) value = v, witness = std::move(w);
    }
  } final_norm, dist_after_one, dist_rise, norm_rise;
  double t_end = 0.0;
  Json rows = Json::array();
  std::size_t rejected_stages = 0;
  for (const auto& s : seeds) {
    for (const auto& st : s.data.at("starts")) {
      const std::string w = seed_witness(s) + " start " + st.at("label").get<std::string>();
      t_end = st.at("t_end").get<double>();
      final_norm.update(st.at("final_norm").get<double>(), w);
      dist_after_one.update(st.at("dist_after_one").get<double>(), w);
      dist_rise.update(st.at("dist_rise").get<double>(), w);
      norm_rise.update(st.at("norm_rise_after_one").get<double>(), w);
      rows.push_back({{"seed", s.seed}, {"index", s.index}, {"start", st}});
    }
    for (const auto& r : s.data.at("ladder")) rejected_stages += r.at("accepted").get<bool>() ? 0 : 1;
  }
  out.assertions.push_back(upper_bound("final_norm",
                                       "homotopy: norm_to_identity at t = " + format_double(t_end) +
                                           " for every (seed, start)",
                                       final_norm.value, tol.at("final_norm"), final_norm.witness));
  out.assertions.push_back(upper_bound("dist_after_one", "homotopy: dist_to_haar for t >= 1", dist_after_one.value,
                                       tol.at("dist_after_one"), dist_after_one.witness));
  out.assertions.push_back(upper_bound("dist_trace_monotone",
                                       "homotopy: rise of dist_to_haar above its running minimum along t",
                                       dist_rise.value, tol.at("monotone_slack"), dist_rise.witness));
  out.assertions.push_back(report("norm_rise_after_one",
                                  "homotopy: rise of norm_to_identity above its running minimum for t >= 1",
                                  norm_rise.value, norm_rise.witness));
  out.details = {{"traces", rows}, {"rejected_adaptive_stages", rejected_stages}};
  return out;
}

}  // namespace

Assertion upper_bound(std::string name, std::string invariant, double measured, double threshold,
                      std::string witness) {
  Assertion a;
  a.name = std::move(name);
  a.invariant = std::move(invariant);
  a.measured = measured;
  a.threshold = threshold;
  a.margin = threshold - measured;
  a.passed = measured <= threshold;
  a.witness = std::move(witness);
  return a;
}

std::string seed_file_name(std::size_t index, const std::string& suffix, const std::string& extension) {
  std::string idx = std::to_string(index);
  if (idx.size() < 3) idx.insert(0, 3 - idx.size(), '0');
  return "seed_" + idx + (suffix.empty() ? "" : "_" + suffix) + extension;
}

std::vector<double> effective_t_grid(const ExperimentConfig& config) {
  if (!config.t_grid.empty()) return config.t_grid;
  switch (config.scenario) {
    case Scenario::lemma32_bounds:
      return {0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
    case Scenario::lemma31_lipschitz:
      return {6.0};
    default:
      return default_t_grid();
  }
}

SeedOutput run_seed(const ExperimentConfig& config, const Tolerances&, std::size_t index, std::uint64_t seed) {
  switch (config.scenario) {
    case Scenario::transport_oracle: return transport_seed(config, index, seed);
    case Scenario::freeconv_validate: return freeconv_seed(config, index, seed);
    case Scenario::lemma31_lipschitz: return lipschitz_seed(config, index, seed);
    case Scenario::lemma32_bounds: return lemma32_seed(config, index, seed);
    case Scenario::contraction_run: return contraction_seed(config, index, seed);
    case Scenario::haar_absorption: return absorption_seed(config, index, seed);
    case Scenario::contraction_fact24: return fact24_seed(config, index, seed);
  }
  throw ConfigError("unhandled scenario");
}

ScenarioOutcome summarize(const ExperimentConfig& config, const Tolerances& tol, const std::vector<SeedOutput>& seeds) {
  require(!seeds.empty(), "summarize needs at least one seed");
  switch (config.scenario) {
    case Scenario::transport_oracle: return transport_summary(tol, seeds);
    case Scenario::freeconv_validate: return freeconv_summary(config, tol, seeds);
    case Scenario::lemma31_lipschitz: return lipschitz_summary(tol, seeds);
    case Scenario::lemma32_bounds: return lemma32_summary(config, tol, seeds);
    case Scenario::contraction_run: return contraction_summary(tol, seeds);
    case Scenario::haar_absorption: return absorption_summary(tol, seeds);
    case Scenario::contraction_fact24: return fact24_summary(tol, seeds);
  }
  throw ConfigError("unhandled scenario");
}

}  // namespace ucontract::cli
