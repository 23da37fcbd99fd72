#pragma once

// Two-stage contraction of a unitary toward the identity:
//   1. h(t, u) = u * w_t right-multiplies by a path of independent Haar
//      unitaries e^{i pi s X_m}, driving the spectral measure toward Haar;
//   2. g_t pulls spectral mass toward angle 0 by functional calculus with
//      f_t(x) = x |2x|^t on (-1/2, 1/2].
// The composite samples g_{s(t)}(h(t, u)) with s(t) = min(d^{-1/2}, t) where
// d is the current distance to Haar.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ucontract/circle_measure.hpp"
#include "ucontract/error.hpp"
#include "ucontract/free_conv.hpp"
#include "ucontract/matrix_model.hpp"
#include "ucontract/rng.hpp"
#include "ucontract/transport.hpp"

namespace ucontract {

/// Re-unitarize the running stage product after this many factors.
inline constexpr std::size_t kReprojectEvery = 8;

struct DeformationParams {
  explicit DeformationParams(double strength) : t(strength) {
    detail::require(std::isfinite(t) && t >= 0.0, "deformation strength must be finite and >= 0");
  }
  double t;
};

/// f_t(x) = x |2x|^t on (-1/2, 1/2]; fixes 0 and 1/2, identity at t = 0.
inline double f_map(double t, double x) {
  detail::require(t >= 0.0, "f_map needs t >= 0");
  const double a = Angle::normalize(x).value();
  if (t == 0.0) return a;
  return a * std::pow(std::abs(2.0 * a), t);
}

inline CircleMap deformation_map(DeformationParams p) {
  return [t = p.t](double x) { return f_map(t, x); };
}

inline UnitaryMatrix g_deform(const UnitaryMatrix& u, double t) {
  const DeformationParams p(t);
  if (p.t == 0.0) return u;
  return functional_calculus(u, deformation_map(p));
}

struct Lemma32Bound {
  double lhs = 0.0;
  double dist_to_haar = 0.0;
  /// (2t+1) d + sqrt(pi / (2(t+1))).
  double rhs_stated = 0.0;
  /// (2t+1) d + pi / sqrt(2t+3).
  double rhs_corrected = 0.0;
};

inline double stated_tail(double t) { return std::sqrt(std::numbers::pi / (2.0 * (t + 1.0))); }
inline double corrected_tail(double t) { return std::numbers::pi / std::sqrt(2.0 * t + 3.0); }

/// Reuses a precomputed eigendecomposition and W2 distance to Haar, so a sweep
/// over t does the expensive work once.
inline Lemma32Bound lemma32_bound(const UnitaryMatrix& u, const UnitaryEigen& eig, double dist_to_haar, double t) {
  const DeformationParams p(t);
  Lemma32Bound out;
  out.dist_to_haar = dist_to_haar;
  out.lhs = p.t == 0.0 ? distance_to_identity(u) : distance_to_identity(apply_map(eig, deformation_map(p)));
  out.rhs_stated = (2.0 * t + 1.0) * out.dist_to_haar + stated_tail(t);
  out.rhs_corrected = (2.0 * t + 1.0) * out.dist_to_haar + corrected_tail(t);
  return out;
}

inline double spectral_dist_to_haar(const UnitaryEigen& eig, std::size_t grid) {
  std::vector<double> angles = eig.angles;
  std::sort(angles.begin(), angles.end());
  return w2_to_haar(CircleMeasure::uniform(angles), grid).distance;
}

inline Lemma32Bound lemma32_bound(const UnitaryMatrix& u, double t, std::size_t grid) {
  const auto eig = unitary_eigen(u);
  return lemma32_bound(u, eig, spectral_dist_to_haar(eig, grid), t);
}

/// s(t, d) = min(d^{-1/2}, t); d = 0 counts as an infinite first argument.
inline double schedule_s(double t, double dist_to_haar) {
  detail::require(t >= 0.0 && dist_to_haar >= 0.0, "schedule_s needs nonnegative arguments");
  if (dist_to_haar == 0.0) return t;
  return std::min(1.0 / std::sqrt(dist_to_haar), t);
}

struct AdaptiveOptions {
  std::vector<UnitaryMatrix> probes;
  double target = 0.1;
  std::size_t max_length = 4;
  std::size_t max_power = 3;
  std::size_t max_retries = 3;
};

struct StageReport {
  std::size_t attempts = 1;
  double defect = 0.0;
  bool accepted = true;
};

/// One Haar generator per unit time interval, shared by every input of an
/// experiment. Stage m's unitary is e^{i pi X_m}; prefix[m] is the product of
/// stages 0..m-1.
class StageLadder {
 public:
  std::size_t dim() const noexcept { return n_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t stages() const noexcept { return generators_.size(); }
  const std::vector<HermitianGenerator>& generators() const noexcept { return generators_; }
  const std::vector<StageReport>& reports() const noexcept { return reports_; }
  const UnitaryMatrix& prefix(std::size_t m) const { return prefix_.at(m); }

  /// w_t with h(t, u) = u w_t.
  UnitaryMatrix right_factor(double t) const {
    detail::require(std::isfinite(t) && t >= 0.0, "homotopy time must be finite and >= 0");
    if (t > static_cast<double>(stages())) {
      throw InvalidArgument("t = " + std::to_string(t) + " is beyond the ladder's " + std::to_string(stages()) +
                            " stages");
    }
    const auto m = static_cast<std::size_t>(std::floor(t));
    const double s = t - static_cast<double>(m);
    if (m == stages() || s == 0.0) return prefix_[m];
    return prefix_[m] * generators_[m].exp_i_pi(s);
  }

 private:
  friend StageLadder build_ladder(std::size_t, std::size_t, std::uint64_t, const AdaptiveOptions*);

  StageLadder(std::size_t n, std::uint64_t seed) : n_(n), seed_(seed) { prefix_.push_back(UnitaryMatrix::identity(n)); }

  void append(HermitianGenerator x, const UnitaryMatrix& stage_unitary, StageReport report) {
    auto next = prefix_.back() * stage_unitary;
    if (prefix_.size() % kReprojectEvery == 0) next = UnitaryMatrix::checked(reunitarize(next.matrix()));
    prefix_.push_back(std::move(next));
    generators_.push_back(std::move(x));
    reports_.push_back(report);
  }

  std::size_t n_;
  std::uint64_t seed_;
  std::vector<HermitianGenerator> generators_;
  std::vector<UnitaryMatrix> prefix_;
  std::vector<StageReport> reports_;
};

/// Seed of the Haar draw for (stage, attempt) of a ladder.
inline std::uint64_t ladder_stream(std::uint64_t seed, std::size_t stage, std::size_t attempt) {
  return derive_seed(seed, {static_cast<std::uint64_t>(StreamOp::ladder), stage, attempt});
}

/// Builds `stages` generators from fresh Haar samples. With adaptive options,
/// a candidate is accepted only when its freeness defect against every
/// probe's current position h(m, u_j) is below the target; otherwise it is
/// resampled up to max_retries times and the best candidate is kept, flagged.
inline StageLadder build_ladder(std::size_t n, std::size_t stages, std::uint64_t seed,
                                const AdaptiveOptions* adaptive = nullptr) {
  detail::require(n >= 1, "ladder dimension must be >= 1");
  detail::require(stages >= 1, "ladder needs at least one stage");
  StageLadder ladder(n, seed);
  for (std::size_t m = 0; m < stages; ++m) {
    if (adaptive == nullptr) {
      auto v = sample_haar_unitary(n, ladder_stream(seed, m, 0));
      auto x = principal_log_generator(v);
      auto stage_unitary = x.exp_i_pi(1.0);
      ladder.append(std::move(x), stage_unitary, StageReport{});
      continue;
    }
    std::optional<HermitianGenerator> best;
    std::optional<UnitaryMatrix> best_unitary;
    StageReport report;
    report.accepted = false;
    report.defect = std::numeric_limits<double>::infinity();
    const std::size_t attempts = adaptive->max_retries + 1;
    for (std::size_t r = 0; r < attempts; ++r) {
      auto v = sample_haar_unitary(n, ladder_stream(seed, m, r));
      auto x = principal_log_generator(v);
      auto stage_unitary = x.exp_i_pi(1.0);
      double defect = 0.0;
      for (const auto& probe : adaptive->probes) {
        detail::require(probe.dim() == n, "probe dimension differs from ladder dimension");
        const auto position = probe * ladder.prefix(m);
        defect = std::max(defect, freeness_defect(position, stage_unitary, adaptive->max_length,
                                                  adaptive->max_power, adaptive->max_length * adaptive->max_power)
                                      .max_defect);
      }
      report.attempts = r + 1;
      if (defect < report.defect) {
        report.defect = defect;
        best.emplace(std::move(x));
        best_unitary.emplace(std::move(stage_unitary));
      }
      if (defect <= adaptive->target) {
        report.accepted = true;
        break;
      }
    }
    ladder.append(std::move(*best), *best_unitary, report);
  }
  return ladder;
}

/// h(t, u) = u e^{i pi X_0} ... e^{i pi X_{m-1}} e^{i pi s X_m}, m = floor(t).
inline UnitaryMatrix h_path(const StageLadder& ladder, const UnitaryMatrix& u, double t) {
  detail::require(u.dim() == ladder.dim(), "input dimension differs from ladder dimension");
  return u * ladder.right_factor(t);
}

struct TraceSample {
  double t = 0.0;
  double dist_to_haar = 0.0;
  double norm_to_identity = 0.0;
  double schedule_s = 0.0;
};

struct HomotopyTrace {
  std::vector<TraceSample> samples;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t grid = 0;
  std::string label;
};

/// Default grid {0, 0.25, ..., 6}.
inline std::vector<double> default_t_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 24; ++i) g.push_back(0.25 * i);
  return g;
}

/// Samples the composite contraction g_{s(t)}(h(t, u)) along t_grid.
inline HomotopyTrace contract(const StageLadder& ladder, const UnitaryMatrix& u, const std::vector<double>& t_grid,
                              std::size_t grid, std::string label = {}) {
  detail::require(!t_grid.empty(), "t grid must be nonempty");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    detail::require(t_grid[i] > t_grid[i - 1], "t grid must be strictly increasing");
  }
  HomotopyTrace trace;
  trace.n = ladder.dim();
  trace.seed = ladder.seed();
  trace.grid = grid;
  trace.label = std::move(label);
  for (double t : t_grid) {
    const auto h = h_path(ladder, u, t);
    const auto eig = unitary_eigen(h);
    auto angles = eig.angles;
    std::sort(angles.begin(), angles.end());
    const double d = w2_to_haar(CircleMeasure::uniform(angles), grid).distance;
    const double s = schedule_s(t, d);
    const double norm = s == 0.0 ? distance_to_identity(h) : distance_to_identity(apply_map(eig, deformation_map(DeformationParams(s))));
    trace.samples.push_back({t, d, norm, s});
  }
  return trace;
}

}  // namespace ucontract
