#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "sinv/greedy.hpp"
#include "sinv/kernels.hpp"
#include "sinv/realization.hpp"
#include "sinv/simulate.hpp"

namespace sinv {

// Both kernels are coverage functions of Y once X and the realization are
// fixed:
//   DE: f(Y) = |union_{y in Y} (reach(y) ∩ X)|
//   DC: f(Y) = (|V| - |reach(X)|) + |union_{y in Y} saved(y)|, where
//       saved(y) = {u : dist(y, u) < dist(X, u)}.
// The DC form follows from the tie rule: u ends up negative iff its plain
// shortest-path distance from X is <= its distance from Y. Hypothesis scores
// are non-negative combinations of these, so greedy only needs the cover lists.

/// Cover lists for one query X over every realization of a bank.
class CoverageIndex {
 public:
  CoverageIndex(const RealizationBank& bank, TaskKind task, const NodeSet& x)
      : node_count_(bank.graph().node_count()), blocks_(bank.size()) {
    for (auto v : x) {
      if (v >= node_count_) throw std::invalid_argument("CoverageIndex: query node out of range");
    }
    base_.assign(blocks_, 0.0);
    std::vector<std::vector<std::pair<NodeId, std::uint32_t>>> per_block(blocks_);
    std::vector<std::uint32_t> block_elements(blocks_, 0);
    for (std::size_t b = 0; b < blocks_; ++b) {
      if (task == TaskKind::DE) {
        build_de(bank[b], x, per_block[b], block_elements[b]);
      } else {
        base_[b] = build_dc(bank[b], x, per_block[b], block_elements[b]);
      }
    }

    std::vector<std::uint32_t> first_element(blocks_ + 1, 0);
    for (std::size_t b = 0; b < blocks_; ++b) first_element[b + 1] = first_element[b] + block_elements[b];
    element_block_.resize(first_element[blocks_]);
    for (std::size_t b = 0; b < blocks_; ++b) {
      for (auto e = first_element[b]; e < first_element[b + 1]; ++e) element_block_[e] = static_cast<std::uint32_t>(b);
    }
    offsets_.assign(node_count_ + 1, 0);
    for (const auto& pairs : per_block) {
      for (const auto& [cand, elem] : pairs) ++offsets_[cand + 1];
    }
    for (std::size_t v = 0; v < node_count_; ++v) offsets_[v + 1] += offsets_[v];
    elements_.resize(offsets_[node_count_]);
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t b = 0; b < blocks_; ++b) {
      for (const auto& [cand, elem] : per_block[b]) elements_[cursor[cand]++] = first_element[b] + elem;
    }
  }

  std::size_t node_count() const { return node_count_; }
  std::size_t block_count() const { return blocks_; }
  std::size_t element_count() const { return element_block_.size(); }
  /// Total cover-list length; a proxy for memory use.
  std::size_t entry_count() const { return elements_.size(); }

  std::span<const std::uint32_t> covers(NodeId v) const {
    return std::span<const std::uint32_t>(elements_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
  }

  /// features[b] = kernel value of Y on realization b.
  KernelFeatures features(const NodeSet& y) const {
    KernelFeatures out(base_.begin(), base_.end());
    std::vector<char> covered(element_count(), 0);
    for (auto v : y) {
      if (v >= node_count_) throw std::invalid_argument("CoverageIndex: node out of range");
      for (auto e : covers(v)) {
        if (!covered[e]) {
          covered[e] = 1;
          out[element_block_[e]] += 1.0;
        }
      }
    }
    return out;
  }

  /// Greedy maximization of sum_b w_b * features_b(Y) over all nodes.
  ///
  /// Weights are normalized by their maximum and quantized to 2^-40, so gains
  /// are exact integers: lazy and plain modes agree, and the result does not
  /// change when w is multiplied by a positive constant.
  NodeSet greedy(std::span<const double> weights, std::size_t budget, GreedyMode mode = GreedyMode::lazy) const {
    if (weights.size() != blocks_) throw std::invalid_argument("CoverageIndex::greedy: weight length mismatch");
    const auto q = quantize(weights);
    std::vector<char> covered(element_count(), 0);
    auto gain = [&](NodeId v) {
      std::int64_t g = 0;
      for (auto e : covers(v)) {
        if (!covered[e]) g += q[element_block_[e]];
      }
      return g;
    };
    auto commit = [&](NodeId v) {
      for (auto e : covers(v)) covered[e] = 1;
    };
    const auto ground = all_nodes(node_count_);
    return make_node_set(greedy_select<std::int64_t>(ground, budget, mode, gain, commit));
  }

  static std::vector<std::int64_t> quantize(std::span<const double> weights) {
    double top = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and non-negative");
      top = std::max(top, w);
    }
    std::vector<std::int64_t> q(weights.size(), 0);
    if (top == 0.0) return q;
    for (std::size_t i = 0; i < weights.size(); ++i) q[i] = std::llround(std::ldexp(weights[i] / top, 40));
    return q;
  }

 private:
  // Elements of a DE block are the query nodes; candidate a covers x when x is
  // reachable from a. Found by reverse search from each x.
  void build_de(const Realization& r, const NodeSet& x, std::vector<std::pair<NodeId, std::uint32_t>>& out,
                std::uint32_t& elements) {
    std::vector<std::uint32_t> stamp(node_count_, 0);
    std::vector<NodeId> stack;
    std::uint32_t id = 0;
    for (auto target : x) {
      const auto mark = id + 1;
      stack.assign(1, target);
      stamp[target] = mark;
      while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        out.emplace_back(v, id);
        for (const auto& arc : r.in_arcs(v)) {
          if (stamp[arc.node] != mark) {
            stamp[arc.node] = mark;
            stack.push_back(arc.node);
          }
        }
      }
      ++id;
    }
    elements = id;
  }

  // Elements of a DC block are the nodes the negative cascade reaches; candidate
  // a covers u when dist(a, u) < dist(X, u). Found by a reverse Dijkstra from u
  // cut off at dist(X, u). Returns the count of nodes never reached from X.
  // Element u (a node reached from X) is saved by candidate v when v's
  // arrival at u beats X's. Searching forward from v, and only through nodes
  // v wins, sums times in the same order as the simulation does.
  double build_dc(const Realization& r, const NodeSet& x, std::vector<std::pair<NodeId, std::uint32_t>>& out,
                  std::uint32_t& elements) {
    const auto from_x = earliest_arrival(r, x);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> limit(node_count_, inf);
    std::size_t reached = 0;
    for (NodeId u = 0; u < node_count_; ++u) {
      if (from_x[u]) {
        limit[u] = *from_x[u];
        ++reached;
      }
    }
    std::vector<double> dist(node_count_, inf);
    std::vector<NodeId> touched;
    using Entry = std::pair<double, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    for (NodeId v = 0; v < node_count_; ++v) {
      if (!(limit[v] > 0.0)) continue;
      queue.emplace(0.0, v);
      dist[v] = 0.0;
      touched.push_back(v);
      while (!queue.empty()) {
        auto [d, w] = queue.top();
        queue.pop();
        if (d > dist[w]) continue;
        if (from_x[w]) out.emplace_back(v, static_cast<std::uint32_t>(w));
        for (const auto& arc : r.out_arcs(w)) {
          const double nd = d + arc.time;
          if (nd < limit[arc.node] && nd < dist[arc.node]) {
            if (dist[arc.node] == inf) touched.push_back(arc.node);
            dist[arc.node] = nd;
            queue.emplace(nd, arc.node);
          }
        }
      }
      for (auto w : touched) dist[w] = inf;
      touched.clear();
    }
    elements = static_cast<std::uint32_t>(node_count_);
    return static_cast<double>(node_count_ - reached);
  }

  std::size_t node_count_;
  std::size_t blocks_;
  std::vector<double> base_;
  std::vector<std::uint32_t> element_block_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> elements_;
};

}  // namespace sinv
