#pragma once

// Dense transportation problem with real-valued supplies and demands, solved
// by successive shortest augmenting paths with Johnson potentials. Every
// augmentation saturates a supply, a demand, or a reverse arc.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ucontract/error.hpp"

namespace ucontract::detail {

struct TransportationResult {
  std::vector<double> flow;  // row-major, rows = supplies
  double cost = 0.0;
  std::size_t augmentations = 0;
};

/// Mass below this is treated as exhausted.
inline constexpr double kFlowEpsilon = 1e-15;

inline TransportationResult solve_transportation(std::span<const double> supply,
                                                 std::span<const double> demand,
                                                 std::span<const double> cost) {
  const std::size_t n = supply.size();
  const std::size_t m = demand.size();
  const std::size_t nodes = n + m;  // rows first, then columns
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<double> rem_supply(supply.begin(), supply.end());
  std::vector<double> rem_demand(demand.begin(), demand.end());
  std::vector<double> flow(n * m, 0.0);
  // Node layout: rows, columns, then the super-sink. The super-source is
  // implicit with potential fixed at 0. All costs are nonnegative, so zero
  // potentials are feasible for the empty flow.
  const std::size_t sink_node = nodes;
  std::vector<double> potential(nodes + 1, 0.0);
  std::vector<double> dist(nodes + 1);
  std::vector<std::size_t> parent(nodes + 1);
  std::vector<char> done(nodes + 1);
  constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

  const std::size_t max_augmentations = 64 * (nodes + 16) * (nodes + 16);
  TransportationResult out;

  for (;;) {
    bool any_supply = false;
    for (double s : rem_supply) any_supply = any_supply || s > kFlowEpsilon;
    bool any_demand = false;
    for (double d : rem_demand) any_demand = any_demand || d > kFlowEpsilon;
    if (!any_supply || !any_demand) break;
    if (++out.augmentations > max_augmentations) {
      throw NumericalError("transportation solver exceeded its augmentation budget");
    }

    std::fill(dist.begin(), dist.end(), inf);
    std::fill(parent.begin(), parent.end(), kNoParent);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (rem_supply[i] > kFlowEpsilon) dist[i] = std::max(0.0, -potential[i]);
    }

    // Dense Dijkstra on reduced costs. Rows reach every column; a column
    // reaches row i only through a reverse arc carrying flow, and reaches the
    // super-sink while it has unmet demand.
    for (;;) {
      std::size_t best = kNoParent;
      for (std::size_t x = 0; x <= nodes; ++x) {
        if (!done[x] && dist[x] < inf && (best == kNoParent || dist[x] < dist[best])) best = x;
      }
      if (best == kNoParent || best == sink_node) break;
      done[best] = 1;
      if (best < n) {
        const std::size_t i = best;
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t y = n + j;
          if (done[y]) continue;
          const double rc = std::max(0.0, cost[i * m + j] + potential[i] - potential[y]);
          if (dist[i] + rc < dist[y]) {
            dist[y] = dist[i] + rc;
            parent[y] = i;
          }
        }
      } else {
        const std::size_t j = best - n;
        for (std::size_t i = 0; i < n; ++i) {
          if (done[i] || flow[i * m + j] <= kFlowEpsilon) continue;
          const double rc = std::max(0.0, -cost[i * m + j] + potential[best] - potential[i]);
          if (dist[best] + rc < dist[i]) {
            dist[i] = dist[best] + rc;
            parent[i] = best;
          }
        }
        if (rem_demand[j] > kFlowEpsilon) {
          const double rc = std::max(0.0, potential[best] - potential[sink_node]);
          if (dist[best] + rc < dist[sink_node]) {
            dist[sink_node] = dist[best] + rc;
            parent[sink_node] = best;
          }
        }
      }
    }
    if (parent[sink_node] == kNoParent) {
      throw NumericalError("transportation solver found no augmenting path");
    }

    const double dsink = dist[sink_node];
    for (std::size_t x = 0; x <= nodes; ++x) {
      potential[x] += done[x] ? dist[x] : dsink;
    }

    // Bottleneck along the path, walking back from the super-sink.
    const std::size_t last_col = parent[sink_node];
    double amount = rem_demand[last_col - n];
    std::size_t x = last_col;
    while (parent[x] != kNoParent) {
      const std::size_t px = parent[x];
      if (px >= n) amount = std::min(amount, flow[x * m + (px - n)]);  // reverse arc col->row
      x = px;
    }
    amount = std::min(amount, rem_supply[x]);

    rem_demand[last_col - n] -= amount;
    rem_supply[x] -= amount;
    x = last_col;
    while (parent[x] != kNoParent) {
      const std::size_t px = parent[x];
      if (px < n) {
        flow[px * m + (x - n)] += amount;
      } else {
        double& f = flow[x * m + (px - n)];
        f -= amount;
        if (f < kFlowEpsilon) f = 0.0;
      }
      x = px;
    }
  }

  for (std::size_t k = 0; k < n * m; ++k) out.cost += flow[k] * cost[k];
  out.flow = std::move(flow);
  return out;
}

}  // namespace ucontract::detail
