#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"

using namespace sinv;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment_config(in);
}

ExperimentConfig tiny() {
  return parse(
      "nodes = 60\nedges = 90\nk_list = 3,6\nm_list = 8,15\ntest_size = 12\n"
      "eval_samples = 20\npair_eval_bank = 20\nrepetitions = 2\nmaster_seed = 5\n");
}

std::string records(const EvaluationReport& r) {
  std::ostringstream out;
  write_report_records(out, r);
  return out.str();
}

}  // namespace

TEST(ExperimentConfig, DefaultsAndParsing) {
  auto cfg = parse("");
  EXPECT_EQ(cfg.nodes, 512u);
  EXPECT_EQ(cfg.edges, 650u);
  EXPECT_EQ(cfg.source_task, TaskKind::DC);
  EXPECT_EQ(cfg.target_task, TaskKind::DE);
  EXPECT_EQ(cfg.repetitions, 5u);
  cfg = parse(
      "# comment\ngraph = er\nsource = de   # trailing\ntarget = dc\nempirical = inf\nk_list = 5,15\n"
      "m_list = 90\nc = 0.5\ncstar = 0.25\nmethod = n_slack\nepochs = 3\nstep = 0.2\ntolerance = 0\n"
      "sample_final = true\nbeta = 0.2\nbaselines = false\n");
  EXPECT_EQ(cfg.source_task, TaskKind::DE);
  EXPECT_TRUE(cfg.empirical.random);
  EXPECT_EQ(cfg.k_list, (std::vector<std::size_t>{5, 15}));
  EXPECT_EQ(cfg.trainer.method, TrainMethod::n_slack);
  EXPECT_EQ(cfg.trainer.c_star, 0.25);
  EXPECT_TRUE(cfg.sample_final);
  EXPECT_FALSE(cfg.baselines);
  EXPECT_EQ(parse("empirical = q=0.5").empirical.q, 0.5);
  EXPECT_EQ(parse("empirical = 0.1").empirical.label(), "q=0.1");
}

TEST(ExperimentConfig, Errors) {
  try {
    parse("nodes = 10\nbogus = 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse("nodes 10\n"), ParseError);
  EXPECT_THROW(parse("c = abc\n"), ParseError);
  EXPECT_THROW(parse("source = xx\n"), ParseError);
  EXPECT_THROW(parse("k_list = 0\n"), std::invalid_argument);
  EXPECT_THROW(parse("graph = file\n"), std::invalid_argument);
  EXPECT_THROW(parse("repetitions = 0\n"), std::invalid_argument);
}

TEST(RunExperiment, DeterministicReports) {
  auto cfg = tiny();
  auto a = run_experiment(cfg);
  auto b = run_experiment(cfg);
  EXPECT_EQ(records(a), records(b));
  cfg.master_seed = 6;
  EXPECT_NE(records(run_experiment(cfg)), records(a));
}

TEST(RunExperiment, ReportShape) {
  auto cfg = tiny();
  auto report = run_experiment(cfg);
  // si-initial x 2 K, si-final x 2 K x 2 m, hd, random, nb x 2 m.
  EXPECT_EQ(report.rows.size(), 2u + 4u + 1u + 1u + 2u);
  EXPECT_EQ(report.records.size(), report.rows.size() * cfg.test_size * cfg.repetitions);
  for (const auto& r : report.records) {
    if (!r.ratio.degenerate) {
      EXPECT_GE(r.ratio.value, 0.0);
    }
  }
  const auto& row = report.row("si-final", 6, 15);
  EXPECT_LE(row.repetition_means.size(), 2u);
  std::ostringstream table;
  write_report_table(table, cfg, report);
  EXPECT_NE(table.str().find("si-final"), std::string::npos);
  EXPECT_THROW(report.row("si-final", 7, 15), std::out_of_range);
}

TEST(RunExperiment, SameTaskConfigurationRuns) {
  auto cfg = tiny();
  cfg.target_task = TaskKind::DC;
  cfg.repetitions = 1;
  cfg.sample_final = true;
  auto report = run_experiment(cfg);
  EXPECT_GT(report.records.size(), 0u);
}

TEST(RunExperiment, GraphFromFile) {
  auto cfg = tiny();
  const std::string path = ::testing::TempDir() + "sinv_graph.txt";
  {
    std::ofstream out(path);
    write_edge_list(out, generate_er(50, 100, 2));
  }
  cfg.graph_type = "file";
  cfg.graph_file = path;
  cfg.repetitions = 1;
  EXPECT_GT(run_experiment(cfg).records.size(), 0u);
}
