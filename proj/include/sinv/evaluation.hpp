#pragma once

#include <cmath>
#include <vector>

#include "sinv/kernels.hpp"
#include "sinv/realization.hpp"

namespace sinv {

struct Ratio {
  double value = 0.0;
  /// Denominator was not positive while the numerator was; excluded from means.
  bool degenerate = false;
};

/// Performance of Yhat against the reference decision for query X, all
/// objectives estimated on the same bank. DE: f(Yhat) / f(Yref). DC measures
/// improvement over the empty decision:
///   (f(Yhat) - f(empty)) / (f(Yref) - f(empty)).
/// Build once per query, then score any number of candidate decisions.
class RatioEvaluator {
 public:
  RatioEvaluator(const RealizationBank& bank, TaskKind task, NodeSet x, const NodeSet& y_ref)
      : bank_(bank), task_(task), x_(std::move(x)) {
    baseline_ = task_ == TaskKind::DC ? estimate({}) : 0.0;
    reference_ = estimate(y_ref);
  }

  double estimate(const NodeSet& y) const { return estimate_objective(bank_, task_, x_, y).mean; }

  Ratio ratio(const NodeSet& y_hat) const {
    const double num = estimate(y_hat) - baseline_;
    const double den = reference_ - baseline_;
    if (den <= 0.0) return num <= 0.0 ? Ratio{1.0, false} : Ratio{0.0, true};
    return Ratio{num / den, false};
  }

 private:
  const RealizationBank& bank_;
  TaskKind task_;
  NodeSet x_;
  double baseline_ = 0.0;
  double reference_ = 0.0;
};

inline Ratio performance_ratio(const RealizationBank& eval_bank, TaskKind task, const NodeSet& x,
                               const NodeSet& y_hat, const NodeSet& y_ref) {
  return RatioEvaluator(eval_bank, task, x, y_ref).ratio(y_hat);
}

inline Ratio performance_ratio(const DiffusionModel& m_true, TaskKind task, const NodeSet& x, const NodeSet& y_hat,
                               const NodeSet& y_ref, std::size_t n, std::uint64_t seed) {
  return performance_ratio(sample_bank(m_true, n, seed), task, x, y_hat, y_ref);
}

}  // namespace sinv
