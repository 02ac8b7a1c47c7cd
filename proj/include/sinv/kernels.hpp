#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sinv/model.hpp"
#include "sinv/realization.hpp"
#include "sinv/simulate.hpp"

namespace sinv {

/// DE: diffusion enhancement (influence the targets X from seeds Y).
/// DC: diffusion containment (limit the negative cascade from X with positive seeds Y).
enum class TaskKind { DE, DC };

inline std::string_view to_string(TaskKind t) { return t == TaskKind::DE ? "de" : "dc"; }

inline TaskKind parse_task(std::string_view s) {
  if (s == "de" || s == "DE") return TaskKind::DE;
  if (s == "dc" || s == "DC") return TaskKind::DC;
  throw std::invalid_argument("unknown task '" + std::string(s) + "' (expected de or dc)");
}

/// Number of nodes in X reached from Y over live edges. No time horizon.
inline double kernel_de(const Realization& r, const NodeSet& x, const NodeSet& y) {
  detail::check_nodes(r, x);
  if (y.empty()) return 0.0;
  const auto reached = reachable_mask(r, y);
  std::size_t count = 0;
  for (auto v : x) count += reached[v] ? 1 : 0;
  return static_cast<double>(count);
}

/// Number of nodes not taken by the negative cascade from X when the positive
/// cascade starts from Y. Y nodes inside X are already negative and are dropped.
inline double kernel_dc(const Realization& r, const NodeSet& x, const NodeSet& y) {
  detail::check_nodes(r, y);
  const auto outcome = simulate(r, CascadeSeeds{{x, set_difference(y, x)}});
  std::size_t negative = 0;
  for (const auto& a : outcome) negative += (a && a->cascade == 1) ? 1 : 0;
  return static_cast<double>(r.node_count() - negative);
}

inline double kernel(TaskKind task, const Realization& r, const NodeSet& x, const NodeSet& y) {
  return task == TaskKind::DE ? kernel_de(r, x, y) : kernel_dc(r, x, y);
}

/// Per-realization kernel values, features[i] = f_{r_i}(X, Y).
using KernelFeatures = std::vector<double>;

inline KernelFeatures feature_map(const RealizationBank& bank, TaskKind task, const NodeSet& x,
                                  const NodeSet& y) {
  KernelFeatures out(bank.size());
  parallel_for(bank.size(), [&](std::size_t i) { out[i] = kernel(task, bank[i], x, y); });
  return out;
}

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

inline Estimate summarize(const std::vector<double>& values) {
  Estimate est;
  const auto n = static_cast<double>(values.size());
  for (double v : values) est.mean += v;
  est.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return est;
}

/// Mean kernel over a fixed bank (common random numbers across candidates).
inline Estimate estimate_objective(const RealizationBank& bank, TaskKind task, const NodeSet& x,
                                   const NodeSet& y) {
  return summarize(feature_map(bank, task, x, y));
}

/// Monte Carlo estimate of the expected kernel under `m` from n fresh realizations.
inline Estimate estimate_objective(const DiffusionModel& m, TaskKind task, const NodeSet& x,
                                   const NodeSet& y, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("estimate_objective: need at least one sample");
  std::vector<double> values(n);
  parallel_for(n, [&](std::size_t i) {
    values[i] = kernel(task, sample_realization(m, realization_seed(seed, i)), x, y);
  });
  return summarize(values);
}

}  // namespace sinv
