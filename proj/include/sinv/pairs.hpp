#pragma once

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinv/coverage.hpp"
#include "sinv/graph.hpp"
#include "sinv/kernels.hpp"
#include "sinv/model.hpp"
#include "sinv/realization.hpp"

namespace sinv {

/// A query X with the decision Y an approximate solver produced for it.
struct QueryDecisionPair {
  TaskKind task = TaskKind::DE;
  NodeSet x;
  NodeSet y;
  std::size_t budget = 0;
  double ratio_tag = 1.0 - 1.0 / M_E;

  friend bool operator==(const QueryDecisionPair&, const QueryDecisionPair&) = default;
};

inline constexpr double kPowerLawExponent = 2.5;
inline constexpr std::size_t kMaxDecisionBudget = 50;

inline double query_scale(TaskKind task) { return task == TaskKind::DE ? 40.0 : 10.0; }

/// Query size clamp(round(scale * s), 1, |V|/2) with s a unit-mean Pareto(2.5)
/// draw; members uniform without replacement.
inline NodeSet generate_query(TaskKind task, const Graph& g, std::uint64_t seed) {
  if (g.node_count() == 0) throw std::invalid_argument("generate_query: empty graph");
  auto rng = make_rng(seed);
  const double s = unit_mean_pareto(rng, kPowerLawExponent);
  const auto cap = std::max<std::size_t>(1, g.node_count() / 2);
  const double raw = std::round(query_scale(task) * s);
  const auto size = static_cast<std::size_t>(std::clamp(raw, 1.0, static_cast<double>(cap)));
  return sample_without_replacement(rng, g.node_count(), size);
}

/// Decision budget clamp(round(10 * s), 1, 50), s unit-mean Pareto(2.5).
inline std::size_t draw_decision_budget(Rng& rng) {
  const double s = unit_mean_pareto(rng, kPowerLawExponent);
  return static_cast<std::size_t>(std::clamp(std::round(10.0 * s), 1.0, static_cast<double>(kMaxDecisionBudget)));
}

/// Greedy decision for X against the bank-average kernel (the Monte Carlo
/// surrogate of the true objective).
inline NodeSet solve_on_bank(const RealizationBank& bank, TaskKind task, const NodeSet& x, std::size_t budget) {
  const CoverageIndex index(bank, task, x);
  const std::vector<double> ones(bank.size(), 1.0);
  return index.greedy(ones, budget);
}

inline QueryDecisionPair generate_pair(const DiffusionModel& m, TaskKind task, std::size_t eval_bank_size,
                                       std::uint64_t seed) {
  QueryDecisionPair pair;
  pair.task = task;
  pair.x = generate_query(task, m.graph(), derive_seed(seed, "query"));
  auto rng = make_rng(derive_seed(seed, "budget"));
  const auto budget = std::min(draw_decision_budget(rng), m.graph().node_count());
  const auto bank = sample_bank(m, eval_bank_size, derive_seed(seed, "bank"));
  pair.y = solve_on_bank(bank, task, pair.x, budget);
  pair.budget = pair.y.size();
  return pair;
}

/// `count` pairs, each from its own stream and its own evaluation bank of
/// `eval_bank_size` realizations.
inline std::vector<QueryDecisionPair> generate_pairs(const DiffusionModel& m, TaskKind task, std::size_t count,
                                                     std::size_t eval_bank_size, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("generate_pairs: count must be at least 1");
  if (eval_bank_size == 0) throw std::invalid_argument("generate_pairs: eval_bank_size must be at least 1");
  std::vector<QueryDecisionPair> pairs(count);
  parallel_for(count, [&](std::size_t i) {
    pairs[i] = generate_pair(m, task, eval_bank_size, derive_seed(seed, "pair", i));
  });
  return pairs;
}

// Pairs file: one pair per line, tab separated:
//   <task> <budget> <X ids comma separated> <Y ids comma separated>
// with "-" for an empty set.

inline void write_pairs(std::ostream& out, const std::vector<QueryDecisionPair>& pairs) {
  for (const auto& p : pairs) {
    out << to_string(p.task) << '\t' << p.budget << '\t' << format_node_list(p.x) << '\t'
        << format_node_list(p.y) << '\n';
  }
}

inline std::vector<QueryDecisionPair> read_pairs(std::istream& in) {
  std::vector<QueryDecisionPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream row(line);
    std::string task, budget, x, y;
    if (!(row >> task >> budget >> x >> y)) throw ParseError(line_no, "expected: task budget X Y");
    QueryDecisionPair p;
    try {
      p.task = parse_task(task);
      p.budget = static_cast<std::size_t>(detail::to_u64(budget));
      p.x = parse_node_list(x);
      p.y = parse_node_list(y);
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
    if (p.y.size() > p.budget) throw ParseError(line_no, "decision larger than budget");
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace sinv
