#pragma once

// L2 Wasserstein distance between circle measures for the chordal cost
// c(a, b) = |e^{2 pi i a} - e^{2 pi i b}|^2 = 2 - 2 cos(2 pi (a - b)).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ucontract/circle_measure.hpp"
#include "ucontract/detail/assignment.hpp"
#include "ucontract/detail/transportation.hpp"
#include "ucontract/error.hpp"

namespace ucontract {

inline constexpr std::size_t kDefaultAtomCap = 4096;
inline constexpr std::size_t kBruteForceMaxAtoms = 8;

struct PlanEntry {
  std::size_t source = 0;
  std::size_t target = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<PlanEntry> pairs;
  double cost = 0.0;
};

struct TransportResult {
  double distance = 0.0;
  TransportPlan plan;
};

struct CyclicResult {
  double distance = 0.0;
  std::size_t shift = 0;
  /// Set only in validation mode: whether the cyclic value matched w2_exact.
  std::optional<bool> matches_exact;
  std::optional<double> exact_distance;
};

struct HaarDistance {
  double distance = 0.0;
  std::size_t grid = 0;
  /// Half-spacing chordal bound pi/grid on the discretization error.
  double discretization_bound = 0.0;
};

namespace detail {

inline std::vector<double> chordal_cost_matrix(std::span<const double> a, std::span<const double> b) {
  // 4 sin^2(pi (a - b)) from half-angle tables; unlike 2 - 2cos this keeps
  // full relative precision for nearby points.
  std::vector<double> ca(a.size()), sa(a.size()), cb(b.size()), sb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca[i] = std::cos(std::numbers::pi * a[i]);
    sa[i] = std::sin(std::numbers::pi * a[i]);
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    cb[j] = std::cos(std::numbers::pi * b[j]);
    sb[j] = std::sin(std::numbers::pi * b[j]);
  }
  std::vector<double> c(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double s = sa[i] * cb[j] - ca[i] * sb[j];
      c[i * b.size() + j] = 4.0 * s * s;
    }
  }
  return c;
}

inline double sqrt_cost(double c) { return std::sqrt(std::max(0.0, c)); }

/// Optimal matching between two equal-size angle lists, each point of mass
/// 1/n. Returns the optimal assignment with the averaged cost.
inline AssignmentResult match_angles(std::span<const double> a, std::span<const double> b) {
  detail::require(a.size() == b.size() && !a.empty(), "matching needs equal, nonempty sizes");
  const std::size_t n = a.size();
  const auto c = chordal_cost_matrix(a, b);
  auto res = solve_assignment(n, [&](std::size_t i, std::size_t j) { return c[i * n + j]; });
  res.cost /= static_cast<double>(n);
  return res;
}

inline void check_cap(std::size_t combined, std::size_t cap) {
  if (combined > cap) {
    throw SizeError("transport input has " + std::to_string(combined) + " atoms, above the cap of " +
                    std::to_string(cap) + "; coarsen with quantile_sample first");
  }
}

inline void require_equal_weight_pair(const CircleMeasure& mu, const CircleMeasure& nu) {
  detail::require(mu.size() == nu.size(), "equal-weight solver needs equal atom counts");
  detail::require(mu.equal_weight() && nu.equal_weight(), "equal-weight solver needs uniform weights");
}

}  // namespace detail

/// W2 between two equal-size point clouds with uniform weights.
inline double w2_matching(std::span<const double> a, std::span<const double> b) {
  return detail::sqrt_cost(detail::match_angles(a, b).cost);
}

/// Exact W2 for the chordal cost. Uniform inputs with equal atom counts are
/// solved as an assignment problem; everything else as a transportation
/// problem over the atoms.
inline TransportResult w2_exact(const CircleMeasure& mu, const CircleMeasure& nu,
                                std::size_t cap = kDefaultAtomCap) {
  detail::check_cap(mu.size() + nu.size(), cap);
  const auto a = mu.angles();
  const auto b = nu.angles();
  TransportResult out;
  if (mu.size() == nu.size() && mu.equal_weight() && nu.equal_weight()) {
    const auto res = detail::match_angles(a, b);
    const double w = 1.0 / static_cast<double>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.plan.pairs.push_back({i, res.row_to_col[i], w});
    out.plan.cost = res.cost;
  } else {
    std::vector<double> supply, demand;
    for (const auto& x : mu.atoms()) supply.push_back(x.weight);
    for (const auto& y : nu.atoms()) demand.push_back(y.weight);
    const auto c = detail::chordal_cost_matrix(a, b);
    const auto res = detail::solve_transportation(supply, demand, c);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        const double f = res.flow[i * b.size() + j];
        if (f > 0.0) out.plan.pairs.push_back({i, j, f});
      }
    }
    out.plan.cost = res.cost;
  }
  out.distance = detail::sqrt_cost(out.plan.cost);
  return out;
}

/// Minimum over all n! pairings of two uniform n-atom measures, n <= 8.
inline double w2_bruteforce(const CircleMeasure& mu, const CircleMeasure& nu) {
  detail::require_equal_weight_pair(mu, nu);
  const std::size_t n = mu.size();
  if (n > kBruteForceMaxAtoms) {
    throw SizeError("brute-force transport supports at most 8 atoms, got " + std::to_string(n));
  }
  const auto a = mu.angles();
  const auto b = nu.angles();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += chordal_cost(a[i], b[perm[i]]);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return detail::sqrt_cost(best / static_cast<double>(n));
}

/// Best cyclic shift of the sorted-order pairing. Not assumed optimal for
/// the chordal cost; with validate = true the result is compared to w2_exact.
inline CyclicResult w2_cyclic(const CircleMeasure& mu, const CircleMeasure& nu, bool validate = false,
                              double agreement_tol = 1e-10) {
  detail::require_equal_weight_pair(mu, nu);
  const std::size_t n = mu.size();
  const auto a = mu.angles();
  const auto b = nu.angles();
  CyclicResult out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += chordal_cost(a[i], b[(i + k) % n]);
    if (c < best) {
      best = c;
      out.shift = k;
    }
  }
  out.distance = detail::sqrt_cost(best / static_cast<double>(n));
  if (validate) {
    const double exact = w2_exact(mu, nu).distance;
    out.exact_distance = exact;
    out.matches_exact = std::abs(exact - out.distance) <= agreement_tol;
  }
  return out;
}

/// Distance to the point mass at 1. Every coupling with a point mass is the
/// product coupling, so this is sqrt(2 - 2 Re m_1).
inline double w2_to_delta1(const CircleMeasure& mu) {
  // 2 - 2 Re m_1, summed as sum_i w_i 4 sin^2(pi theta_i) to avoid cancellation.
  double cost = 0.0;
  for (const auto& a : mu.atoms()) cost += a.weight * chordal_cost(a.angle, 0.0);
  return detail::sqrt_cost(cost);
}

inline HaarDistance w2_to_haar(const CircleMeasure& mu, std::size_t grid) {
  detail::require(grid >= 1, "Haar grid must be >= 1");
  detail::check_cap(grid, kDefaultAtomCap);
  const auto q = quantile_angles(mu, grid);
  const auto h = haar_discretization(grid).angles();
  return {w2_matching(q, h), grid, std::numbers::pi / static_cast<double>(grid)};
}

/// Checks the marginal and cost invariants of a plan. Returns an empty string
/// when the plan is valid, otherwise a description of the first violation.
inline std::string validate_plan(const TransportPlan& plan, const CircleMeasure& mu, const CircleMeasure& nu,
                                 double tol = 1e-10) {
  std::vector<double> rows(mu.size(), 0.0), cols(nu.size(), 0.0);
  double cost = 0.0;
  for (const auto& p : plan.pairs) {
    if (p.source >= mu.size() || p.target >= nu.size()) return "plan index out of range";
    if (p.mass < 0.0) return "negative plan mass";
    rows[p.source] += p.mass;
    cols[p.target] += p.mass;
    cost += p.mass * chordal_cost(mu.atoms()[p.source].angle, nu.atoms()[p.target].angle);
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (std::abs(rows[i] - mu.atoms()[i].weight) > tol) return "row " + std::to_string(i) + " marginal mismatch";
  }
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (std::abs(cols[j] - nu.atoms()[j].weight) > tol) return "column " + std::to_string(j) + " marginal mismatch";
  }
  if (std::abs(cost - plan.cost) > tol) return "plan cost mismatch";
  return {};
}

}  // namespace ucontract
