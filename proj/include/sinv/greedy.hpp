#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "sinv/util.hpp"

namespace sinv {

enum class GreedyMode { plain, lazy };

/// Monotone set function evaluated on a sorted candidate set.
using ScoreFunction = std::function<double(const NodeSet&)>;

/// Shared greedy loop. `gain(v)` is the marginal gain of v given everything
/// committed so far; `commit(v)` adds v. Picks the largest gain, breaking ties
/// by the smaller id, and always returns min(budget, |ground|) elements. The
/// lazy variant keeps stale gains as upper bounds; with exact, non-increasing
/// gains it returns the same sequence as the plain loop.
template <class Gain, class GainFn, class CommitFn>
std::vector<NodeId> greedy_select(std::span<const NodeId> ground, std::size_t budget, GreedyMode mode,
                                  GainFn&& gain, CommitFn&& commit) {
  std::vector<NodeId> chosen;
  const auto target = std::min(budget, ground.size());
  if (target == 0) return chosen;
  chosen.reserve(target);

  if (mode == GreedyMode::plain) {
    std::vector<char> taken(ground.size(), 0);
    while (chosen.size() < target) {
      std::size_t best = ground.size();
      Gain best_gain{};
      for (std::size_t i = 0; i < ground.size(); ++i) {
        if (taken[i]) continue;
        const Gain g = gain(ground[i]);
        if (best == ground.size() || g > best_gain || (g == best_gain && ground[i] < ground[best])) {
          best = i;
          best_gain = g;
        }
      }
      taken[best] = 1;
      chosen.push_back(ground[best]);
      commit(ground[best]);
    }
    return chosen;
  }

  struct Entry {
    Gain bound;
    NodeId node;
    std::size_t round;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    return a.bound != b.bound ? a.bound < b.bound : a.node > b.node;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  for (auto v : ground) heap.push({gain(v), v, 0});
  std::size_t round = 0;
  while (chosen.size() < target) {
    auto top = heap.top();
    heap.pop();
    if (top.round == round) {
      chosen.push_back(top.node);
      commit(top.node);
      ++round;
    } else {
      top.bound = gain(top.node);
      top.round = round;
      heap.push(top);
    }
  }
  return chosen;
}

namespace detail {

inline NodeSet with(const NodeSet& s, NodeId v) {
  NodeSet out(s);
  out.insert(std::lower_bound(out.begin(), out.end(), v), v);
  return out;
}

inline NodeSet sorted_ground(std::span<const NodeId> ground) {
  return make_node_set(std::vector<NodeId>(ground.begin(), ground.end()));
}

}  // namespace detail

/// Greedy maximization of a monotone submodular score under |Y| <= budget.
inline NodeSet greedy_max(const ScoreFunction& score, std::span<const NodeId> ground, std::size_t budget,
                          GreedyMode mode = GreedyMode::lazy) {
  const auto sorted = detail::sorted_ground(ground);
  NodeSet current;
  double current_value = score(current);
  auto picked = greedy_select<double>(
      sorted, budget, mode, [&](NodeId v) { return score(detail::with(current, v)) - current_value; },
      [&](NodeId v) {
        current = detail::with(current, v);
        current_value = score(current);
      });
  return make_node_set(std::move(picked));
}

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

inline constexpr double kMaxEnumeration = 1e6;

/// Calls fn(subset) for every subset of `ground` with size <= max_size, in
/// lexicographic order of sorted id lists within each size, sizes ascending.
template <class Fn>
void for_each_subset(std::span<const NodeId> ground, std::size_t max_size, Fn&& fn) {
  const auto sorted = detail::sorted_ground(ground);
  const auto n = sorted.size();
  max_size = std::min(max_size, n);
  double total = 0.0;
  for (std::size_t k = 0; k <= max_size; ++k) total += binomial(n, k);
  if (total > kMaxEnumeration) throw std::invalid_argument("subset enumeration exceeds 1e6 candidates");
  NodeSet subset;
  for (std::size_t k = 0; k <= max_size; ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      subset.resize(k);
      for (std::size_t i = 0; i < k; ++i) subset[i] = sorted[idx[i]];
      fn(subset);
      // advance to the next k-combination
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
}

/// Exact maximizer over subsets of size <= budget; ties go to the
/// lexicographically smallest id list.
inline NodeSet brute_force_max(const ScoreFunction& score, std::span<const NodeId> ground, std::size_t budget) {
  NodeSet best;
  double best_value = -std::numeric_limits<double>::infinity();
  for_each_subset(ground, budget, [&](const NodeSet& s) {
    const double value = score(s);
    if (value > best_value || (value == best_value && std::lexicographical_compare(s.begin(), s.end(), best.begin(), best.end()))) {
      best = s;
      best_value = value;
    }
  });
  return best;
}

inline std::vector<NodeId> all_nodes(std::size_t n) {
  std::vector<NodeId> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<NodeId>(i);
  return out;
}

}  // namespace sinv
