#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinv/coverage.hpp"
#include "sinv/kernels.hpp"
#include "sinv/pairs.hpp"
#include "sinv/realization.hpp"

namespace sinv {

enum class TrainMethod { subgradient, n_slack };

inline std::string_view to_string(TrainMethod m) { return m == TrainMethod::subgradient ? "subgradient" : "n_slack"; }

inline TrainMethod parse_train_method(std::string_view s) {
  if (s == "subgradient") return TrainMethod::subgradient;
  if (s == "n_slack" || s == "n-slack") return TrainMethod::n_slack;
  throw std::invalid_argument("unknown training method '" + std::string(s) + "'");
}

struct TrainerConfig {
  double c = 0.01;       // slack trade-off
  double c_star = 1.0;   // margin coefficient on the sample decision's score
  TrainMethod method = TrainMethod::subgradient;
  std::size_t epochs = 10;
  double step_scale = 0.1;  // eta_t = step_scale / sqrt(t)
  double tolerance = 1e-3;  // relative violation below which a sample counts as satisfied
  std::uint64_t seed = 0;

  void validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("TrainerConfig: C must be positive");
    if (!(c_star > 0.0 && c_star <= 1.0)) throw std::invalid_argument("TrainerConfig: C* must lie in (0, 1]");
    if (epochs == 0) throw std::invalid_argument("TrainerConfig: epochs must be at least 1");
    if (!(step_scale > 0.0)) throw std::invalid_argument("TrainerConfig: step scale must be positive");
    if (!(tolerance >= 0.0)) throw std::invalid_argument("TrainerConfig: tolerance must be non-negative");
  }
};

/// Non-negative weights over the realizations of one bank. The score of
/// (X, Y) for a task is sum_i w_i * f_{r_i}(X, Y).
struct HypothesisWeights {
  std::vector<double> w;
  std::uint64_t bank_hash = 0;
  TaskKind source_task = TaskKind::DE;
  TaskKind target_task = TaskKind::DE;
  TrainerConfig config;
};

inline HypothesisWeights initial_weights(const RealizationBank& bank, TaskKind source, TaskKind target,
                                         const TrainerConfig& cfg = {}) {
  return HypothesisWeights{std::vector<double>(bank.size(), 1.0), bank.hash(), source, target, cfg};
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace detail {

inline void check_bank(const HypothesisWeights& h, const RealizationBank& bank) {
  if (h.w.size() != bank.size()) throw std::invalid_argument("weights length does not match bank size");
  if (h.bank_hash != bank.hash()) throw std::invalid_argument("weights were trained on a different realization bank");
}

inline void check_non_negative(std::span<const double> w) {
  for (double v : w) {
    if (!(v >= 0.0)) throw std::invalid_argument("weights must be non-negative");
  }
}

}  // namespace detail

inline double hypothesis_score(const HypothesisWeights& h, const RealizationBank& bank, TaskKind task,
                               const NodeSet& x, const NodeSet& y) {
  detail::check_bank(h, bank);
  if (task != h.source_task && task != h.target_task) {
    throw std::invalid_argument("hypothesis_score: task is neither the source nor the target task");
  }
  return dot(h.w, feature_map(bank, task, x, y));
}

/// Most violated constraint for query X: greedy maximizer of the source-task score.
inline NodeSet separation_oracle(std::span<const double> w, const RealizationBank& bank, TaskKind source_task,
                                 const NodeSet& x, std::size_t budget) {
  detail::check_non_negative(w);
  if (w.size() != bank.size()) throw std::invalid_argument("separation_oracle: weight length mismatch");
  return CoverageIndex(bank, source_task, x).greedy(w, budget);
}

/// Greedy decision for a target-task query under the learned weights.
inline NodeSet infer(const HypothesisWeights& h, const RealizationBank& bank, const NodeSet& x, std::size_t k) {
  detail::check_bank(h, bank);
  detail::check_non_negative(h.w);
  return CoverageIndex(bank, h.target_task, x).greedy(h.w, k);
}

struct TrainingReport {
  HypothesisWeights weights;
  /// Objective J after initialization and after each epoch (outer round for n_slack).
  std::vector<double> objective_trace;
  std::size_t epochs_run = 0;
};

namespace detail {

struct TrainingSample {
  CoverageIndex index;
  KernelFeatures reference;  // features of the sample decision
  std::size_t budget;
};

class Trainer {
 public:
  Trainer(const std::vector<QueryDecisionPair>& pairs, const RealizationBank& bank, TaskKind source,
          const TrainerConfig& cfg)
      : cfg_(cfg), k_(bank.size()) {
    samples_.reserve(pairs.size());
    for (const auto& p : pairs) {
      CoverageIndex index(bank, source, p.x);
      auto reference = index.features(p.y);
      samples_.push_back({std::move(index), std::move(reference), p.budget});
    }
  }

  std::size_t size() const { return samples_.size(); }

  KernelFeatures oracle_features(std::size_t i, const std::vector<double>& w) const {
    const auto& s = samples_[i];
    return s.index.features(s.index.greedy(w, s.budget));
  }

  double slack(std::size_t i, const std::vector<double>& w, const KernelFeatures& phi_hat) const {
    return std::max(0.0, dot(w, phi_hat) - cfg_.c_star * dot(w, samples_[i].reference));
  }

  double relative_violation(std::size_t i, const std::vector<double>& w, double xi) const {
    const double scale = cfg_.c_star * dot(w, samples_[i].reference);
    return xi / std::max(scale, 1e-12);
  }

  /// J(w) = |w|^2 + (C/m) * sum_i xi_i(w), with xi_i from the oracle at w.
  double objective(const std::vector<double>& w) const {
    double slack_sum = 0.0;
    for (std::size_t i = 0; i < samples_.size(); ++i) slack_sum += slack(i, w, oracle_features(i, w));
    return dot(w, w) + cfg_.c * slack_sum / static_cast<double>(samples_.size());
  }

  /// One projected subgradient step on a violated sample i, against phi_hat.
  void step(std::vector<double>& w, std::size_t i, const KernelFeatures& phi_hat) {
    ++t_;
    const double eta = cfg_.step_scale / std::sqrt(static_cast<double>(t_));
    const double m = static_cast<double>(samples_.size());
    const auto& phi = samples_[i].reference;
    for (std::size_t j = 0; j < k_; ++j) {
      const double g = 2.0 * w[j] / m + cfg_.c / m * (phi_hat[j] - cfg_.c_star * phi[j]);
      w[j] = std::max(0.0, w[j] - eta * g);
    }
  }

  std::vector<std::size_t> epoch_order(std::size_t epoch) const {
    std::vector<std::size_t> order(samples_.size());
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_rng(derive_seed(cfg_.seed, "epoch", epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_below(rng, i)]);
    return order;
  }

  const TrainerConfig& config() const { return cfg_; }

 private:
  TrainerConfig cfg_;
  std::size_t k_;
  std::size_t t_ = 0;
  std::vector<TrainingSample> samples_;
};

struct BestTracker {
  std::vector<double> w;
  double value;
  void offer(const std::vector<double>& candidate, double j) {
    if (j < value) {
      w = candidate;
      value = j;
    }
  }
};

}  // namespace detail

/// Learns w >= 0 from source-task pairs by approximately minimizing
///   J(w) = |w|^2 + (C/m) * sum_i max(0, H_w(X_i, Yhat_i(w)) - C* H_w(X_i, Y_i)),
/// where Yhat_i(w) is the separation oracle's answer. Starts from all-ones and
/// returns the best iterate seen (by J), so J never ends above its initial value.
inline TrainingReport train_with_report(const std::vector<QueryDecisionPair>& pairs, const RealizationBank& bank,
                                        TaskKind source_task, TaskKind target_task, const TrainerConfig& cfg) {
  cfg.validate();
  if (pairs.empty()) throw std::invalid_argument("train: no training pairs");
  for (const auto& p : pairs) {
    if (p.task != source_task) throw std::invalid_argument("train: pair task differs from the source task");
  }
  detail::Trainer trainer(pairs, bank, source_task, cfg);
  TrainingReport report;
  std::vector<double> w(bank.size(), 1.0);
  detail::BestTracker best{w, trainer.objective(w)};
  report.objective_trace.push_back(best.value);

  if (cfg.method == TrainMethod::subgradient) {
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
      double worst = 0.0;
      for (auto i : trainer.epoch_order(epoch)) {
        const auto phi_hat = trainer.oracle_features(i, w);
        const double xi = trainer.slack(i, w, phi_hat);
        const double rel = trainer.relative_violation(i, w, xi);
        worst = std::max(worst, rel);
        if (rel > cfg.tolerance) trainer.step(w, i, phi_hat);
      }
      const double j = trainer.objective(w);
      report.objective_trace.push_back(j);
      best.offer(w, j);
      report.epochs_run = epoch;
      if (worst <= cfg.tolerance) break;
    }
  } else {
    // Cutting planes: grow per-sample working sets with oracle answers, then
    // run the same projected subgradient loop on the restricted problem.
    std::vector<std::vector<KernelFeatures>> working(trainer.size());
    for (std::size_t round = 1; round <= cfg.epochs; ++round) {
      std::size_t added = 0;
      for (std::size_t i = 0; i < trainer.size(); ++i) {
        auto phi_hat = trainer.oracle_features(i, w);
        const double xi_new = trainer.slack(i, w, phi_hat);
        double xi_known = 0.0;
        for (const auto& phi : working[i]) xi_known = std::max(xi_known, trainer.slack(i, w, phi));
        if (trainer.relative_violation(i, w, xi_new - xi_known) > cfg.tolerance) {
          working[i].push_back(std::move(phi_hat));
          ++added;
        }
      }
      report.epochs_run = round;
      if (added == 0) break;
      for (std::size_t pass = 1; pass <= cfg.epochs; ++pass) {
        for (auto i : trainer.epoch_order(round * (cfg.epochs + 1) + pass)) {
          const KernelFeatures* most = nullptr;
          double xi_most = 0.0;
          for (const auto& phi : working[i]) {
            const double xi = trainer.slack(i, w, phi);
            if (xi > xi_most) {
              xi_most = xi;
              most = &phi;
            }
          }
          if (most && trainer.relative_violation(i, w, xi_most) > cfg.tolerance) trainer.step(w, i, *most);
        }
      }
      const double j = trainer.objective(w);
      report.objective_trace.push_back(j);
      best.offer(w, j);
    }
  }
  report.weights = HypothesisWeights{std::move(best.w), bank.hash(), source_task, target_task, cfg};
  return report;
}

inline HypothesisWeights train(const std::vector<QueryDecisionPair>& pairs, const RealizationBank& bank,
                               TaskKind source_task, TaskKind target_task, const TrainerConfig& cfg) {
  return train_with_report(pairs, bank, source_task, target_task, cfg).weights;
}

// Weights file:
//   sinv-weights 1
//   k <K>
//   bank_hash <hex>
//   source <de|dc>
//   target <de|dc>
//   c <C>
//   cstar <C*>
//   method <subgradient|n_slack>
//   epochs <n>
//   step <eta0>
//   tolerance <tol>
//   seed <n>
//   weights
//   <w_1>
//   ...

inline void write_weights(std::ostream& out, const HypothesisWeights& h) {
  out << "sinv-weights 1\n";
  out << "k " << h.w.size() << "\n";
  out << "bank_hash " << hex64(h.bank_hash) << "\n";
  out << "source " << to_string(h.source_task) << "\n";
  out << "target " << to_string(h.target_task) << "\n";
  out << "c " << format_double(h.config.c) << "\n";
  out << "cstar " << format_double(h.config.c_star) << "\n";
  out << "method " << to_string(h.config.method) << "\n";
  out << "epochs " << h.config.epochs << "\n";
  out << "step " << format_double(h.config.step_scale) << "\n";
  out << "tolerance " << format_double(h.config.tolerance) << "\n";
  out << "seed " << h.config.seed << "\n";
  out << "weights\n";
  for (double v : h.w) out << format_double(v) << "\n";
}

inline HypothesisWeights read_weights(std::istream& in) {
  std::string line;
  std::getline(in, line);
  if (line != "sinv-weights 1") throw std::runtime_error("not a weights file");
  HypothesisWeights h;
  const auto k = detail::to_u64(detail::expect_field(in, "k"));
  h.bank_hash = parse_hex64(detail::expect_field(in, "bank_hash"));
  h.source_task = parse_task(detail::expect_field(in, "source"));
  h.target_task = parse_task(detail::expect_field(in, "target"));
  h.config.c = parse_double(detail::expect_field(in, "c"));
  h.config.c_star = parse_double(detail::expect_field(in, "cstar"));
  h.config.method = parse_train_method(detail::expect_field(in, "method"));
  h.config.epochs = detail::to_u64(detail::expect_field(in, "epochs"));
  h.config.step_scale = parse_double(detail::expect_field(in, "step"));
  h.config.tolerance = parse_double(detail::expect_field(in, "tolerance"));
  h.config.seed = detail::to_u64(detail::expect_field(in, "seed"));
  std::getline(in, line);
  if (line != "weights") throw std::runtime_error("expected 'weights'");
  h.w.resize(k);
  for (auto& v : h.w) {
    if (!std::getline(in, line)) throw std::runtime_error("weights file truncated");
    v = parse_double(line);
  }
  detail::check_non_negative(h.w);
  return h;
}

}  // namespace sinv
