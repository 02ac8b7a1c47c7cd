#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "sinv/graph.hpp"
#include "sinv/pairs.hpp"

namespace sinv {

/// Highest total degree nodes, ties by smaller id.
inline NodeSet hd_predict(const Graph& g, std::size_t k) {
  return make_node_set(top_degree_nodes(g, std::min(k, g.node_count())));
}

inline NodeSet random_predict(const Graph& g, std::size_t k, std::uint64_t seed) {
  if (k > g.node_count()) throw std::invalid_argument("random_predict: k exceeds node count");
  auto rng = make_rng(seed);
  return sample_without_replacement(rng, g.node_count(), k);
}

/// Bernoulli tables for Pr[v in Y] and Pr[u in X | v in Y], add-one smoothed.
class NaiveBayesModel {
 public:
  NaiveBayesModel(std::size_t node_count, std::size_t pair_count) : decision_count_(node_count, 0), m_(pair_count) {}

  double node_prior(NodeId v) const {
    return (static_cast<double>(decision_count_[v]) + 1.0) / (static_cast<double>(m_) + 2.0);
  }

  /// Pr[u in X | v in Y].
  double cooccur(NodeId u, NodeId v) const {
    const auto it = joint_.find(key(u, v));
    const double joint = it == joint_.end() ? 0.0 : static_cast<double>(it->second);
    return (joint + 1.0) / (static_cast<double>(decision_count_[v]) + 2.0);
  }

  std::size_t node_count() const { return decision_count_.size(); }
  std::size_t pair_count() const { return m_; }

  /// ln Pr[v] + sum_{u in X} ln Pr[u | v].
  double log_score(const NodeSet& x, NodeId v) const {
    double s = std::log(node_prior(v));
    for (auto u : x) s += std::log(cooccur(u, v));
    return s;
  }

 private:
  static std::uint64_t key(NodeId u, NodeId v) { return (static_cast<std::uint64_t>(u) << 32) | v; }

  std::vector<std::size_t> decision_count_;
  std::unordered_map<std::uint64_t, std::size_t> joint_;
  std::size_t m_;

  friend NaiveBayesModel nb_train(const std::vector<QueryDecisionPair>& pairs, std::size_t node_count);
};

inline NaiveBayesModel nb_train(const std::vector<QueryDecisionPair>& pairs, std::size_t node_count) {
  if (pairs.empty()) throw std::invalid_argument("nb_train: no pairs");
  NaiveBayesModel nb(node_count, pairs.size());
  for (const auto& p : pairs) {
    for (auto v : p.y) {
      if (v >= node_count) throw std::invalid_argument("nb_train: node out of range");
      ++nb.decision_count_[v];
      for (auto u : p.x) {
        if (u >= node_count) throw std::invalid_argument("nb_train: node out of range");
        ++nb.joint_[NaiveBayesModel::key(u, v)];
      }
    }
  }
  return nb;
}

/// Top-k nodes by Naive Bayes log-score, ties by smaller id.
inline NodeSet nb_predict(const NaiveBayesModel& nb, const NodeSet& x, std::size_t k) {
  const auto n = nb.node_count();
  k = std::min(k, n);
  std::vector<std::pair<double, NodeId>> scored(n);
  for (NodeId v = 0; v < n; ++v) scored[v] = {nb.log_score(x, v), v};
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  NodeSet out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(scored[i].second);
  return make_node_set(std::move(out));
}

}  // namespace sinv
