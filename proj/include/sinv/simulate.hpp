#pragma once

#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "sinv/realization.hpp"
#include "sinv/util.hpp"

namespace sinv {

/// Seed sets of L cascades; seed_sets[0] is cascade 1 (highest priority).
struct CascadeSeeds {
  std::vector<NodeSet> seed_sets;
};

struct Activation {
  int cascade = 0;  // 1-based
  double time = 0.0;
  NodeId parent = kNoNode;  // activating in-neighbor; kNoNode for seeds
};

using ActivationOutcome = std::vector<std::optional<Activation>>;

namespace detail {

inline void check_nodes(const Realization& r, const NodeSet& nodes) {
  for (auto v : nodes) {
    if (v >= r.node_count()) throw std::invalid_argument("node id " + std::to_string(v) + " out of range");
  }
}

}  // namespace detail

/// Multi-cascade diffusion on a realization. Each node takes the earliest
/// arrival; equal arrival times go to the smaller cascade index and then to
/// the smaller predecessor id. Implemented as Dijkstra with the composite key
/// (time, cascade, predecessor).
inline ActivationOutcome simulate(const Realization& r, const CascadeSeeds& seeds) {
  const auto n = r.node_count();
  std::vector<int> owner(n, 0);
  for (std::size_t c = 0; c < seeds.seed_sets.size(); ++c) {
    detail::check_nodes(r, seeds.seed_sets[c]);
    for (auto v : seeds.seed_sets[c]) {
      if (owner[v] != 0) throw std::invalid_argument("simulate: seed sets must be disjoint");
      owner[v] = static_cast<int>(c + 1);
    }
  }

  using Entry = std::tuple<double, int, NodeId, NodeId>;  // time, cascade, parent, node
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (std::size_t c = 0; c < seeds.seed_sets.size(); ++c) {
    for (auto v : seeds.seed_sets[c]) queue.emplace(0.0, static_cast<int>(c + 1), kNoNode, v);
  }
  ActivationOutcome outcome(n);
  while (!queue.empty()) {
    auto [t, cascade, parent, v] = queue.top();
    queue.pop();
    if (outcome[v]) continue;
    outcome[v] = Activation{cascade, t, parent};
    for (const auto& arc : r.out_arcs(v)) {
      if (!outcome[arc.node]) queue.emplace(t + arc.time, cascade, v, arc.node);
    }
  }
  return outcome;
}

using ArrivalTimes = std::vector<std::optional<double>>;

/// Shortest live-path time from any source; sources at 0, unreachable absent.
inline ArrivalTimes earliest_arrival(const Realization& r, const NodeSet& sources) {
  detail::check_nodes(r, sources);
  ArrivalTimes dist(r.node_count());
  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (auto s : sources) queue.emplace(0.0, s);
  while (!queue.empty()) {
    auto [t, v] = queue.top();
    queue.pop();
    if (dist[v]) continue;
    dist[v] = t;
    for (const auto& arc : r.out_arcs(v)) {
      if (!dist[arc.node]) queue.emplace(t + arc.time, arc.node);
    }
  }
  return dist;
}

/// Nodes reachable from `sources` over live edges (sources included), as a mask.
inline std::vector<char> reachable_mask(const Realization& r, const NodeSet& sources) {
  detail::check_nodes(r, sources);
  std::vector<char> seen(r.node_count(), 0);
  std::vector<NodeId> stack;
  for (auto s : sources) {
    if (!seen[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (const auto& arc : r.out_arcs(v)) {
      if (!seen[arc.node]) {
        seen[arc.node] = 1;
        stack.push_back(arc.node);
      }
    }
  }
  return seen;
}

}  // namespace sinv
