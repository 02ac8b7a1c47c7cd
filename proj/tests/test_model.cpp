#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"

using namespace sinv;
using namespace sinv::testing;

TEST(TrueModel, WeightedCascadeProbabilities) {
  // Node 4 has in-neighbors 0..3; node 5 has only 4.
  auto g = make_graph(6, {{0, 4}, {1, 4}, {2, 4}, {3, 4}, {4, 5}});
  auto m = build_true_model(g, 1);
  for (auto e : g->in_edges(4)) EXPECT_EQ(m.edge(e).prob, 0.25);
  EXPECT_EQ(m.edge(*g->find_edge(4, 5)).prob, 1.0);
  EXPECT_EQ(m.descriptor(), "true");
}

TEST(TrueModel, WeibullParametersAreIntegersOneToTen) {
  auto g = std::make_shared<const Graph>(generate_er(300, 10000, 3));
  auto m = build_true_model(g, 5);
  std::vector<int> seen_shape(11, 0), seen_scale(11, 0);
  for (const auto& p : m.params()) {
    ASSERT_EQ(p.shape, std::floor(p.shape));
    ASSERT_EQ(p.scale, std::floor(p.scale));
    ASSERT_GE(p.shape, 1.0);
    ASSERT_LE(p.shape, 10.0);
    ASSERT_GE(p.scale, 1.0);
    ASSERT_LE(p.scale, 10.0);
    ++seen_shape[static_cast<int>(p.shape)];
    ++seen_scale[static_cast<int>(p.scale)];
  }
  for (int v = 1; v <= 10; ++v) {
    EXPECT_GT(seen_shape[v], 0);
    EXPECT_GT(seen_scale[v], 0);
  }
}

TEST(TrueModel, DeterministicAndRejectsEdgeless) {
  auto g = std::make_shared<const Graph>(generate_er(50, 100, 1));
  EXPECT_EQ(build_true_model(g, 9).hash(), build_true_model(g, 9).hash());
  EXPECT_NE(build_true_model(g, 9).hash(), build_true_model(g, 10).hash());
  EXPECT_THROW(build_true_model(make_graph(3, {}), 1), std::invalid_argument);
}

TEST(PerturbModel, TinyQLeavesParametersNearlyUnchanged) {
  auto g = std::make_shared<const Graph>(generate_er(100, 400, 2));
  auto m = build_true_model(g, 1);
  auto pm = perturb_model(m, 1e-12, 3);
  for (EdgeId e = 0; e < g->edge_count(); ++e) {
    EXPECT_NEAR(pm.edge(e).prob, m.edge(e).prob, 1e-11);
    EXPECT_NEAR(pm.edge(e).shape, m.edge(e).shape, 1e-10);
    EXPECT_NEAR(pm.edge(e).scale, m.edge(e).scale, 1e-10);
  }
}

TEST(PerturbModel, RedrawsWithinInterval) {
  auto g = std::make_shared<const Graph>(generate_er(200, 2000, 2));
  auto m = build_true_model(g, 1);
  for (double q : {0.1, 0.5, 1.0}) {
    auto pm = perturb_model(m, q, 7);
    EXPECT_EQ(pm.descriptor(), "q=" + format_double(q));
    for (EdgeId e = 0; e < g->edge_count(); ++e) {
      const auto& a = m.edge(e);
      const auto& b = pm.edge(e);
      EXPECT_GE(b.prob, a.prob * (1 - q) - 1e-15);
      EXPECT_LE(b.prob, std::min(1.0, a.prob * (1 + q)) + 1e-15);
      EXPECT_GE(b.shape, std::max(a.shape * (1 - q), kMinWeibullParam) - 1e-12);
      EXPECT_LE(b.shape, a.shape * (1 + q));
      EXPECT_GE(b.scale, std::max(a.scale * (1 - q), kMinWeibullParam) - 1e-12);
      EXPECT_LE(b.scale, a.scale * (1 + q));
    }
  }
}

TEST(PerturbModel, QOneRedrawsProbabilityOnZeroToTwoP) {
  // A single in-edge per target gives p = 1/2 when every node has two in-edges.
  std::vector<Edge> edges;
  const std::size_t n = 2000;
  for (NodeId v = 0; v < n; ++v) {
    edges.push_back({static_cast<NodeId>((v + 1) % n), v});
    edges.push_back({static_cast<NodeId>((v + 2) % n), v});
  }
  auto g = make_graph(n, edges);
  auto m = build_true_model(g, 1);
  auto pm = perturb_model(m, 1.0, 2);
  double lo = 1, hi = 0, sum = 0;
  for (const auto& p : pm.params()) {
    lo = std::min(lo, p.prob);
    hi = std::max(hi, p.prob);
    sum += p.prob;
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LE(hi, 1.0);
  EXPECT_LT(lo, 0.01);
  EXPECT_GT(hi, 0.99);
  // Uniform on [0, 1]: mean 1/2, sd 1/sqrt(12).
  const double count = static_cast<double>(pm.params().size());
  EXPECT_NEAR(sum / count, 0.5, 3 / std::sqrt(12 * count));
}

TEST(PerturbModel, RedrawIsUnbiased) {
  auto g = std::make_shared<const Graph>(generate_er(400, 10000, 2));
  std::vector<EdgeParams> params(g->edge_count(), EdgeParams{0.4, 5.0, 3.0});
  DiffusionModel m(g, params, "flat", 0);
  auto pm = perturb_model(m, 0.5, 3);
  double sp = 0, sa = 0, sb = 0;
  for (const auto& p : pm.params()) {
    sp += p.prob;
    sa += p.shape;
    sb += p.scale;
  }
  const double n = static_cast<double>(pm.params().size());
  // Uniform on [x/2, 3x/2] has sd x/sqrt(12).
  EXPECT_NEAR(sp / n, 0.4, 3 * 0.4 / std::sqrt(12 * n));
  EXPECT_NEAR(sa / n, 5.0, 3 * 5.0 / std::sqrt(12 * n));
  EXPECT_NEAR(sb / n, 3.0, 3 * 3.0 / std::sqrt(12 * n));
}

TEST(PerturbModel, RejectsNonPositiveQ) {
  auto g = std::make_shared<const Graph>(generate_er(20, 40, 1));
  auto m = build_true_model(g, 1);
  EXPECT_THROW(perturb_model(m, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(perturb_model(m, -0.5, 1), std::invalid_argument);
}

TEST(RandomModel, UniformParameters) {
  auto g = std::make_shared<const Graph>(generate_er(300, 10000, 4));
  auto m = random_model(g, 1);
  double sum = 0;
  for (const auto& p : m.params()) {
    EXPECT_GE(p.prob, 0.0);
    EXPECT_LE(p.prob, 1.0);
    EXPECT_GE(p.shape, kMinWeibullParam);
    EXPECT_GE(p.scale, kMinWeibullParam);
    EXPECT_LE(p.shape, 1.0);
    sum += p.prob;
  }
  const double n = static_cast<double>(m.params().size());
  EXPECT_NEAR(sum / n, 0.5, 3 / std::sqrt(12 * n));
  EXPECT_NE(random_model(g, 1).hash(), random_model(g, 2).hash());
  EXPECT_EQ(m.descriptor(), "random");
}

TEST(DiffusionModel, ValidatesParameters) {
  auto g = make_graph(2, {{0, 1}});
  EXPECT_THROW(DiffusionModel(g, {{1.5, 1, 1}}, "x", 0), std::invalid_argument);
  EXPECT_THROW(DiffusionModel(g, {{0.5, 0, 1}}, "x", 0), std::invalid_argument);
  EXPECT_THROW(DiffusionModel(g, {}, "x", 0), std::invalid_argument);
}

TEST(ModelFile, RoundTrip) {
  auto g = std::make_shared<const Graph>(generate_er(80, 300, 4));
  auto m = perturb_model(build_true_model(g, 1), 0.1, 2);
  std::stringstream io;
  write_model(io, m);
  auto back = read_model(io);
  EXPECT_EQ(back.hash(), m.hash());
  EXPECT_EQ(back.descriptor(), m.descriptor());
  EXPECT_EQ(back.seed(), m.seed());
}

TEST(ModelFile, RejectsCorruption) {
  auto g = std::make_shared<const Graph>(generate_er(10, 20, 4));
  std::stringstream io;
  write_model(io, build_true_model(g, 1));
  auto text = io.str();
  auto tampered = text;
  tampered.replace(tampered.find("graph_hash ") + 11, 1, tampered[tampered.find("graph_hash ") + 11] == '0' ? "1" : "0");
  std::istringstream bad(tampered);
  EXPECT_THROW(read_model(bad), std::runtime_error);
  std::istringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_THROW(read_model(truncated), std::runtime_error);
  std::istringstream wrong("hello\n");
  EXPECT_THROW(read_model(wrong), std::runtime_error);
}
