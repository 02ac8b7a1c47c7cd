#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

using namespace sinv;
using namespace sinv::testing;

namespace {

const double kRatio = 1.0 - 1.0 / M_E;

}  // namespace

TEST(GammaValue, AllOnesExample) {
  const std::vector<double> w(30, 1.0);
  const double g = gamma_value(w, 270, 0.3, kRatio);
  EXPECT_NEAR(g, 26.2, 0.05);
  EXPECT_NEAR(g, static_cast<double>(gamma_reference(w, 270, 0.3, kRatio)), 1e-12 * g);
}

TEST(GammaValue, ScalingFollowsFormula) {
  const std::vector<double> w(30, 1.0);
  for (double c : {0.5, 2.0, 3.0}) {
    std::vector<double> s(30, c);
    const double expected = (kRatio * kRatio + 1) / (c * 0.3 * kRatio) * std::sqrt(2 * std::log(2.0 * 270 * 30 / (30 * c * c)));
    EXPECT_NEAR(gamma_value(s, 270, 0.3, kRatio), expected, 1e-12 * expected);
  }
}

TEST(GammaValue, DomainErrors) {
  const std::vector<double> w(30, 1.0);
  EXPECT_GT(gamma_value(w, 270, kRatio - 1e-9, kRatio), 0.0);
  EXPECT_TRUE(std::isfinite(gamma_value(w, 270, kRatio - 1e-9, kRatio)));
  EXPECT_THROW(gamma_value(w, 270, kRatio, kRatio), std::domain_error);
  EXPECT_THROW(gamma_value(w, 270, 0.0, kRatio), std::domain_error);
  auto z = w;
  z[4] = 0;
  EXPECT_THROW(gamma_value(z, 270, 0.3, kRatio), std::domain_error);
  EXPECT_THROW(gamma_value(std::vector<double>(2, 10.0), 1, 0.3, kRatio), std::domain_error);
  EXPECT_THROW(gamma_value({}, 10, 0.3, kRatio), std::domain_error);
}

TEST(GammaValue, MatchesReferenceOnRandomInputs) {
  auto rng = make_rng(71);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> w(1 + uniform_below(rng, 60));
    for (auto& v : w) v = uniform_real(rng, 0.05, 2.0);
    const std::size_t m = 10 + uniform_below(rng, 2000);
    const double a = uniform_real(rng, 0.3, 1.0);
    const double beta = uniform_real(rng, 0.01, a * 0.99);
    double sq = 0;
    for (double v : w) sq += v * v;
    if (2.0 * m * w.size() <= sq) continue;
    const double g = gamma_value(w, m, beta, a);
    EXPECT_NEAR(g, static_cast<double>(gamma_reference(w, m, beta, a)), 1e-12 * g);
  }
}

TEST(PacBound, ZeroWeights) {
  const std::vector<double> w(10, 0.0);
  EXPECT_DOUBLE_EQ(pac_bound(0.0, w, 270, 5.0, 0.05), std::sqrt(std::log(270 / 0.05) / (2 * 269.0)));
}

TEST(PacBound, MonotoneAndAboveRisk) {
  auto rng = make_rng(72);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> w(1 + uniform_below(rng, 40));
    for (auto& v : w) v = uniform01(rng);
    const std::size_t m = 2 + uniform_below(rng, 1000);
    const double gamma = uniform_real(rng, 0.1, 50), delta = uniform_real(rng, 0.001, 0.999);
    const double risk = uniform01(rng);
    const double b = pac_bound(risk, w, m, gamma, delta);
    EXPECT_NEAR(b, static_cast<double>(bound_reference(risk, w, m, gamma, delta)), 1e-12 * b);
    EXPECT_GE(b, risk);
    EXPECT_GT(pac_bound(risk, w, m, gamma * 1.01, delta), b);
    auto bigger = w;
    for (auto& v : bigger) v = v * 1.01 + 1e-3;
    EXPECT_GT(pac_bound(risk, bigger, m, gamma, delta), b);
  }
}

TEST(PacBound, DomainErrors) {
  const std::vector<double> w(3, 1.0);
  EXPECT_THROW(pac_bound(0, w, 1, 1, 0.1), std::domain_error);
  EXPECT_THROW(pac_bound(0, w, 10, 1, 0.0), std::domain_error);
  EXPECT_THROW(pac_bound(0, w, 10, 1, 1.0), std::domain_error);
}

TEST(SampleFinalWeights, MeanDeterminismAndClip) {
  const std::vector<double> prior{1.0, 2.0, 0.5};
  const double gamma = 20;
  const int n = 10000;
  std::vector<double> sum(3, 0.0);
  for (int i = 0; i < n; ++i) {
    auto w = sample_final_weights(prior, gamma, derive_seed(1, "draw", i));
    for (int p = 0; p < 3; ++p) sum[p] += w[p];
  }
  for (int p = 0; p < 3; ++p) EXPECT_NEAR(sum[p] / n, gamma * prior[p], 3 / std::sqrt(n));
  EXPECT_EQ(sample_final_weights(prior, gamma, 5), sample_final_weights(prior, gamma, 5));
  for (double v : sample_final_weights(std::vector<double>(200, 0.0), 1.0, 6)) EXPECT_GE(v, 0.0);
  EXPECT_THROW(sample_final_weights(prior, 0.0, 1), std::invalid_argument);
}

TEST(Margin, Examples) {
  // Y = Y_ref is always inside: a - 1 <= beta.
  EXPECT_TRUE(within_margin(5.0, 5.0, 0.01, kRatio));
  EXPECT_TRUE(within_margin(0.0, 0.0, 0.3, kRatio));
  EXPECT_FALSE(within_margin(0.0, 5.0, 0.3, kRatio));
  EXPECT_TRUE(within_margin(5.0 * (kRatio - 0.3), 5.0, 0.3, kRatio));
}

TEST(Margin, MembershipListMatchesOneByOne) {
  auto rng = make_rng(73);
  auto bank = random_bank(rng, 6, 3, true);
  std::vector<double> w{0.5, 1.0, 2.0};
  HypothesisWeights h{w, bank.hash(), TaskKind::DC, TaskKind::DE, {}};
  NodeSet x{0, 3, 5};
  auto y_ref = infer(h, bank, x, 2);
  const double ref = [&] {
    double s = 0;
    for (std::size_t b = 0; b < 3; ++b) s += w[b] * oracle_de(bank[b], x, y_ref);
    return s;
  }();
  for (unsigned mask = 0; mask < 64; ++mask) {
    NodeSet y;
    for (NodeId v = 0; v < 6; ++v)
      if (mask >> v & 1) y.push_back(v);
    double s = 0;
    for (std::size_t b = 0; b < 3; ++b) s += w[b] * oracle_de(bank[b], x, y);
    EXPECT_EQ(margin_membership(h, bank, x, y, y_ref, 0.3, kRatio), kRatio * ref - s <= 0.3 * ref);
  }
}

TEST(EmpiricalRisk, MatchesExhaustiveEnumeration) {
  auto rng = make_rng(74);
  for (int trial = 0; trial < 10; ++trial) {
    auto bank = random_bank(rng, 6, 3, true);
    std::vector<double> w(3);
    for (auto& v : w) v = 0.2 + uniform01(rng);
    HypothesisWeights h{w, bank.hash(), TaskKind::DE, TaskKind::DC, {}};
    std::vector<QueryDecisionPair> pairs;
    for (int i = 0; i < 4; ++i) {
      QueryDecisionPair p;
      p.x = random_subset(rng, 6, 0.3);
      p.budget = 1 + uniform_below(rng, 3);
      p.task = TaskKind::DC;
      pairs.push_back(p);
    }
    // Loss: fraction of the query left uncovered by a fixed reference, in [0, 1].
    DecisionLoss loss = [](const NodeSet& x, const NodeSet& y) {
      return static_cast<double>(set_difference(x, y).size()) / (x.size() + 1.0);
    };
    const double beta = 0.3;
    const double expected = enumerated_risk(h, bank, pairs, beta, kRatio, loss);
    EXPECT_DOUBLE_EQ(empirical_risk(h, bank, pairs, beta, kRatio, loss), expected);
  }
}

TEST(EmpiricalRisk, TrivialLosses) {
  auto rng = make_rng(75);
  auto bank = random_bank(rng, 6, 2, true);
  HypothesisWeights h{{1.0, 1.0}, bank.hash(), TaskKind::DE, TaskKind::DE, {}};
  std::vector<QueryDecisionPair> pairs(3);
  for (auto& p : pairs) {
    p.x = {0, 1, 2};
    p.budget = 2;
  }
  EXPECT_EQ(empirical_risk(h, bank, pairs, 0.3, kRatio, [](auto&, auto&) { return 0.0; }), 0.0);
  EXPECT_EQ(empirical_risk(h, bank, pairs, kRatio - 1e-9, kRatio, [](auto&, auto&) { return 1.0; }), 1.0);
  EXPECT_THROW(empirical_risk(h, bank, {}, 0.3, kRatio, [](auto&, auto&) { return 0.0; }), std::invalid_argument);
}

TEST(EmpiricalRisk, EnumerationGuard) {
  auto g = std::make_shared<const Graph>(generate_er(200, 300, 1));
  auto bank = sample_bank(build_true_model(g, 1), 2, 1);
  auto h = initial_weights(bank, TaskKind::DE, TaskKind::DE);
  QueryDecisionPair p;
  p.x = {1, 2};
  p.budget = 5;
  EXPECT_THROW(empirical_risk(h, bank, {p}, 0.3, kRatio, [](auto&, auto&) { return 0.0; }), std::invalid_argument);
}
