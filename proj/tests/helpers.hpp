#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <tuple>
#include <vector>

#include "sinv/sinv.hpp"

namespace sinv::testing {

struct TimedEdge {
  NodeId from, to;
  double time;
};

inline std::shared_ptr<const Graph> make_graph(std::size_t n, std::vector<Edge> edges) {
  return std::make_shared<const Graph>(n, std::move(edges));
}

/// Realization where exactly the listed edges exist and are live.
inline Realization fixed_realization(std::size_t n, const std::vector<TimedEdge>& arcs) {
  std::vector<Edge> edges;
  for (const auto& a : arcs) edges.push_back({a.from, a.to});
  auto g = make_graph(n, edges);
  std::vector<EdgeId> live;
  std::vector<double> times;
  for (const auto& a : arcs) {
    live.push_back(*g->find_edge(a.from, a.to));
    times.push_back(a.time);
  }
  std::vector<std::size_t> order(live.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return live[a] < live[b]; });
  std::vector<EdgeId> l2;
  std::vector<double> t2;
  for (auto i : order) {
    l2.push_back(live[i]);
    t2.push_back(times[i]);
  }
  return Realization(g, l2, t2);
}

inline Realization path_realization() { return fixed_realization(3, {{0, 1, 1.0}, {1, 2, 1.0}}); }

/// Random small realization. Integer times make arrival ties common.
inline Realization random_realization(Rng& rng, std::size_t n, double edge_p, double live_p, bool integer_times) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u != v && uniform01(rng) < edge_p) edges.push_back({u, v});
    }
  }
  auto g = make_graph(n, edges);
  std::vector<EdgeId> live;
  std::vector<double> times;
  for (EdgeId e = 0; e < g->edge_count(); ++e) {
    if (uniform01(rng) < live_p) {
      live.push_back(e);
      times.push_back(integer_times ? static_cast<double>(1 + uniform_below(rng, 3)) : uniform_real(rng, 0.1, 5.0));
    }
  }
  return Realization(g, live, times);
}

inline NodeSet random_subset(Rng& rng, std::size_t n, double p) {
  NodeSet s;
  for (NodeId v = 0; v < n; ++v) {
    if (uniform01(rng) < p) s.push_back(v);
  }
  return s;
}

inline DiffusionModel uniform_model(std::shared_ptr<const Graph> g, double p, double shape, double scale) {
  std::vector<EdgeParams> params(g->edge_count(), EdgeParams{p, shape, scale});
  return DiffusionModel(std::move(g), std::move(params), "fixture", 0);
}

// Independent oracles.

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// All-pairs live-path distances by Floyd-Warshall.
inline std::vector<std::vector<double>> floyd(const Realization& r) {
  const auto n = r.node_count();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (std::size_t v = 0; v < n; ++v) d[v][v] = 0.0;
  const auto& g = r.graph();
  for (std::size_t i = 0; i < r.live_edges().size(); ++i) {
    const auto& e = g.edge(r.live_edges()[i]);
    d[e.from][e.to] = std::min(d[e.from][e.to], r.travel_times()[i]);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

/// Earliest arrival by enumerating every simple live path from every source.
inline std::vector<double> path_enumeration(const Realization& r, const NodeSet& sources) {
  const auto n = r.node_count();
  std::vector<double> best(n, kInf);
  std::vector<char> on_path(n, 0);
  auto dfs = [&](auto&& self, NodeId v, double t) -> void {
    best[v] = std::min(best[v], t);
    on_path[v] = 1;
    for (const auto& a : r.out_arcs(v)) {
      if (!on_path[a.node]) self(self, a.node, t + a.time);
    }
    on_path[v] = 0;
  };
  for (auto s : sources) dfs(dfs, s, 0.0);
  return best;
}

/// Round-based multi-cascade simulation: repeatedly settle the unlabeled node
/// with the earliest (time, cascade) offer from already labeled nodes.
inline std::vector<std::optional<std::pair<int, double>>> naive_cascades(const Realization& r,
                                                                          const std::vector<NodeSet>& seeds) {
  const auto n = r.node_count();
  std::vector<std::optional<std::pair<int, double>>> label(n);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (auto v : seeds[i]) label[v] = std::make_pair(static_cast<int>(i + 1), 0.0);
  }
  const auto& g = r.graph();
  while (true) {
    std::optional<std::tuple<double, int, NodeId>> best;
    for (std::size_t i = 0; i < r.live_edges().size(); ++i) {
      const auto& e = g.edge(r.live_edges()[i]);
      if (!label[e.from] || label[e.to]) continue;
      const std::tuple<double, int, NodeId> offer{label[e.from]->second + r.travel_times()[i], label[e.from]->first,
                                                  e.to};
      if (!best || offer < *best) best = offer;
    }
    if (!best) break;
    label[std::get<2>(*best)] = std::make_pair(std::get<1>(*best), std::get<0>(*best));
  }
  return label;
}

inline double oracle_de(const Realization& r, const NodeSet& x, const NodeSet& y) {
  const auto d = floyd(r);
  double count = 0;
  for (auto u : x) {
    for (auto s : y) {
      if (d[s][u] < kInf) {
        ++count;
        break;
      }
    }
  }
  return count;
}

inline double oracle_dc(const Realization& r, const NodeSet& x, const NodeSet& y) {
  const auto labels = naive_cascades(r, {x, set_difference(y, x)});
  double negative = 0;
  for (const auto& l : labels) {
    if (l && l->first == 1) ++negative;
  }
  return static_cast<double>(r.node_count()) - negative;
}

inline double oracle_kernel(TaskKind task, const Realization& r, const NodeSet& x, const NodeSet& y) {
  return task == TaskKind::DE ? oracle_de(r, x, y) : oracle_dc(r, x, y);
}

inline RealizationBank bank_of(std::vector<Realization> rs) {
  return RealizationBank(std::move(rs), "fixture", 0, 0);
}

inline RealizationBank random_bank(Rng& rng, std::size_t n, std::size_t k, bool integer_times) {
  // Realizations must share one graph: draw the graph once, then live sets.
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (u != v && uniform01(rng) < 0.35) edges.push_back({u, v});
  auto g = make_graph(n, edges);
  std::vector<Realization> rs;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<EdgeId> live;
    std::vector<double> times;
    for (EdgeId e = 0; e < g->edge_count(); ++e) {
      if (uniform01(rng) < 0.6) {
        live.push_back(e);
        times.push_back(integer_times ? static_cast<double>(1 + uniform_below(rng, 3)) : uniform_real(rng, 0.1, 5.0));
      }
    }
    rs.emplace_back(g, live, times);
  }
  return bank_of(std::move(rs));
}


// Diagnostics re-evaluated in long double.

long double gamma_reference(const std::vector<double>& w, std::size_t m, double beta, double a) {
  long double lo = std::fabs(static_cast<long double>(w[0])), sq = 0;
  for (double v : w) {
    lo = std::min(lo, std::fabs(static_cast<long double>(v)));
    sq += static_cast<long double>(v) * v;
  }
  const long double la = a;
  return (la * la + 1) / (lo * beta * la) * std::sqrt(2 * std::log(2.0L * m * w.size() / sq));
}

long double bound_reference(double risk, const std::vector<double>& w, std::size_t m, double gamma, double delta) {
  long double sq = 0;
  for (double v : w) sq += static_cast<long double>(v) * v;
  const long double lm = m;
  return risk + sq / lm + std::sqrt((static_cast<long double>(gamma) * gamma * sq / 2 + std::log(lm / delta)) / (2 * (lm - 1)));
}

/// Empirical risk by bitmask enumeration over every decision of a small graph,
/// scoring with the independent kernel oracles.
inline double enumerated_risk(const HypothesisWeights& h, const RealizationBank& bank,
                              const std::vector<QueryDecisionPair>& pairs, double beta, double ratio,
                              const DecisionLoss& loss) {
  const auto n = bank.graph().node_count();
  double total = 0;
  for (const auto& p : pairs) {
    auto score = [&](const NodeSet& y) {
      double s = 0;
      for (std::size_t b = 0; b < bank.size(); ++b) s += h.w[b] * oracle_kernel(h.target_task, bank[b], p.x, y);
      return s;
    };
    const double ref = score(infer(h, bank, p.x, p.budget));
    double worst = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) > p.budget) continue;
      NodeSet y;
      for (NodeId v = 0; v < n; ++v)
        if (mask >> v & 1) y.push_back(v);
      if (ratio * ref - score(y) <= beta * ref) worst = std::max(worst, loss(p.x, y));
    }
    total += worst;
  }
  return total / static_cast<double>(pairs.size());
}

}  // namespace sinv::testing
