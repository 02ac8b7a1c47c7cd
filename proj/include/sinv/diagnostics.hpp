#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sinv/greedy.hpp"
#include "sinv/learner.hpp"

namespace sinv {

// Generalization diagnostics for a prior weight vector. Pure arithmetic apart
// from empirical_risk, which enumerates candidate decisions.

/// Scale of the Gaussian posterior Q(gamma * w, I):
///   (a^2 + 1) / (min_p |w_p| * beta * a) * sqrt(2 ln(2 m K / |w|^2)),
/// with a the inference approximation ratio.
inline double gamma_value(std::span<const double> prior, std::size_t m, double beta, double inference_ratio) {
  if (prior.empty()) throw std::domain_error("gamma_value: empty weight vector");
  if (!(beta > 0.0 && beta < inference_ratio)) throw std::domain_error("gamma_value: need 0 < beta < inference ratio");
  if (!(inference_ratio <= 1.0)) throw std::domain_error("gamma_value: inference ratio must be at most 1");
  double min_abs = std::abs(prior[0]);
  double norm_sq = 0.0;
  for (double w : prior) {
    min_abs = std::min(min_abs, std::abs(w));
    norm_sq += w * w;
  }
  if (min_abs == 0.0) throw std::domain_error("gamma_value: zero weight coordinate");
  const double log_arg = 2.0 * static_cast<double>(m) * static_cast<double>(prior.size()) / norm_sq;
  if (!(log_arg > 1.0)) throw std::domain_error("gamma_value: requires 2mK > |w|^2");
  const double a = inference_ratio;
  return (a * a + 1.0) / (min_abs * beta * a) * std::sqrt(2.0 * std::log(log_arg));
}

/// Right-hand side of the PAC-Bayes bound:
///   em_risk + |w|^2/m + sqrt((gamma^2 |w|^2 / 2 + ln(m/delta)) / (2(m-1))).
inline double pac_bound(double em_risk, std::span<const double> prior, std::size_t m, double gamma, double delta) {
  if (m < 2) throw std::domain_error("pac_bound: need m >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("pac_bound: need 0 < delta < 1");
  double norm_sq = 0.0;
  for (double w : prior) norm_sq += w * w;
  const double md = static_cast<double>(m);
  return em_risk + norm_sq / md + std::sqrt((gamma * gamma * norm_sq / 2.0 + std::log(md / delta)) / (2.0 * (md - 1.0)));
}

/// Draws w_p ~ Normal(gamma * prior_p, 1), clipped at 0.
inline std::vector<double> sample_final_weights(std::span<const double> prior, double gamma, std::uint64_t seed) {
  if (!(gamma > 0.0)) throw std::invalid_argument("sample_final_weights: gamma must be positive");
  auto rng = make_rng(seed);
  std::vector<double> out(prior.size());
  for (std::size_t p = 0; p < prior.size(); ++p) out[p] = std::max(0.0, gamma * prior[p] + standard_normal(rng));
  return out;
}

/// Whether a candidate score lies in the margin set around the reference
/// inference output: a * ref - candidate <= beta * ref.
inline bool within_margin(double candidate_score, double reference_score, double beta, double inference_ratio) {
  return inference_ratio * reference_score - candidate_score <= beta * reference_score;
}

inline bool margin_membership(const HypothesisWeights& h, const RealizationBank& bank, const NodeSet& x,
                              const NodeSet& y, const NodeSet& y_ref, double beta, double inference_ratio) {
  return within_margin(hypothesis_score(h, bank, h.target_task, x, y),
                       hypothesis_score(h, bank, h.target_task, x, y_ref), beta, inference_ratio);
}

/// Loss of decision Y for query X, in [0, 1].
using DecisionLoss = std::function<double(const NodeSet& x, const NodeSet& y)>;

/// (1/m) sum_i max { loss(X_i, Y) : |Y| <= budget_i, Y in the margin set of X_i },
/// with the reference decision for X_i produced by `infer`. Enumerates every Y.
inline double empirical_risk(const HypothesisWeights& h, const RealizationBank& bank,
                             const std::vector<QueryDecisionPair>& pairs, double beta, double inference_ratio,
                             const DecisionLoss& loss) {
  if (pairs.empty()) throw std::invalid_argument("empirical_risk: no pairs");
  const auto ground = all_nodes(bank.graph().node_count());
  double total = 0.0;
  for (const auto& p : pairs) {
    const CoverageIndex index(bank, h.target_task, p.x);
    const auto y_ref = infer(h, bank, p.x, p.budget);
    const double ref_score = dot(h.w, index.features(y_ref));
    double worst = 0.0;
    for_each_subset(ground, p.budget, [&](const NodeSet& y) {
      if (within_margin(dot(h.w, index.features(y)), ref_score, beta, inference_ratio)) {
        worst = std::max(worst, loss(p.x, y));
      }
    });
    total += worst;
  }
  return total / static_cast<double>(pairs.size());
}

}  // namespace sinv
