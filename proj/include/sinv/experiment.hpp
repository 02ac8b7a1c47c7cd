#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "sinv/baselines.hpp"
#include "sinv/diagnostics.hpp"
#include "sinv/evaluation.hpp"
#include "sinv/graph.hpp"
#include "sinv/learner.hpp"
#include "sinv/model.hpp"
#include "sinv/pairs.hpp"
#include "sinv/realization.hpp"

namespace sinv {

/// Distribution the hypothesis bank is drawn from: the true model perturbed
/// by level q, or a fully random model.
struct EmpiricalSpec {
  bool random = false;
  double q = 0.1;

  std::string label() const { return random ? "inf" : "q=" + format_double(q); }

  static EmpiricalSpec parse(std::string_view s) {
    if (s == "inf" || s == "random") return {true, 0.0};
    if (s.starts_with("q=")) s.remove_prefix(2);
    else if (s.starts_with("q")) s.remove_prefix(1);
    return {false, parse_double(s)};
  }
};

struct ExperimentConfig {
  std::string graph_type = "er";  // "er" or "file"
  std::size_t nodes = 512;
  std::uint64_t edges = 650;
  std::string graph_file;
  TaskKind source_task = TaskKind::DC;
  TaskKind target_task = TaskKind::DE;
  EmpiricalSpec empirical;
  std::vector<std::size_t> k_list{15, 30, 60};
  std::vector<std::size_t> m_list{270};
  std::size_t test_size = 200;
  std::size_t eval_samples = 200;
  std::size_t pair_eval_bank = 200;
  TrainerConfig trainer;
  bool sample_final = false;
  double beta = 0.3;
  bool baselines = true;
  std::uint64_t master_seed = 1;
  std::size_t repetitions = 5;

  void validate() const {
    if (graph_type != "er" && graph_type != "file") throw std::invalid_argument("graph must be 'er' or 'file'");
    if (graph_type == "file" && graph_file.empty()) throw std::invalid_argument("graph_file is required for graph = file");
    if (k_list.empty() || m_list.empty()) throw std::invalid_argument("k_list and m_list must be non-empty");
    for (auto k : k_list) if (k == 0) throw std::invalid_argument("K must be positive");
    for (auto m : m_list) if (m == 0) throw std::invalid_argument("m must be positive");
    if (test_size == 0 || eval_samples == 0 || pair_eval_bank == 0 || repetitions == 0) {
      throw std::invalid_argument("test_size, eval_samples, pair_eval_bank and repetitions must be positive");
    }
    if (!empirical.random && !(empirical.q > 0.0)) throw std::invalid_argument("perturbation level must be positive");
    trainer.validate();
  }
};

namespace detail {

inline std::vector<std::size_t> parse_size_list(std::string_view s) {
  std::vector<std::size_t> out;
  for (auto v : parse_node_list(s)) out.push_back(v);
  return out;
}

inline bool parse_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected a boolean, got '" + std::string(s) + "'");
}

}  // namespace detail

/// Flat "key = value" text; '#' starts a comment. Unknown keys are errors.
inline ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const std::string key(detail::trim(text.substr(0, eq)));
    const std::string value(detail::trim(text.substr(eq + 1)));
    try {
      if (key == "graph") cfg.graph_type = value;
      else if (key == "nodes") cfg.nodes = detail::to_u64(value);
      else if (key == "edges") cfg.edges = detail::to_u64(value);
      else if (key == "graph_file") cfg.graph_file = value;
      else if (key == "source") cfg.source_task = parse_task(value);
      else if (key == "target") cfg.target_task = parse_task(value);
      else if (key == "empirical") cfg.empirical = EmpiricalSpec::parse(value);
      else if (key == "k_list") cfg.k_list = detail::parse_size_list(value);
      else if (key == "m_list") cfg.m_list = detail::parse_size_list(value);
      else if (key == "test_size") cfg.test_size = detail::to_u64(value);
      else if (key == "eval_samples") cfg.eval_samples = detail::to_u64(value);
      else if (key == "pair_eval_bank") cfg.pair_eval_bank = detail::to_u64(value);
      else if (key == "c") cfg.trainer.c = parse_double(value);
      else if (key == "cstar") cfg.trainer.c_star = parse_double(value);
      else if (key == "method") cfg.trainer.method = parse_train_method(value);
      else if (key == "epochs") cfg.trainer.epochs = detail::to_u64(value);
      else if (key == "step") cfg.trainer.step_scale = parse_double(value);
      else if (key == "tolerance") cfg.trainer.tolerance = parse_double(value);
      else if (key == "sample_final") cfg.sample_final = detail::parse_bool(value);
      else if (key == "beta") cfg.beta = parse_double(value);
      else if (key == "baselines") cfg.baselines = detail::parse_bool(value);
      else if (key == "master_seed") cfg.master_seed = detail::to_u64(value);
      else if (key == "repetitions") cfg.repetitions = detail::to_u64(value);
      else throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  cfg.validate();
  return cfg;
}

struct RatioRecord {
  std::size_t repetition = 0;
  std::size_t query = 0;
  std::string method;  // si-initial, si-final, hd, random, nb
  std::size_t k = 0;   // 0 when not applicable
  std::size_t m = 0;   // 0 when not applicable
  Ratio ratio;
};

struct SummaryRow {
  std::string method;
  std::size_t k = 0;
  std::size_t m = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> repetition_means;
  std::size_t degenerate = 0;
  std::size_t above_one = 0;
};

struct EvaluationReport {
  std::vector<SummaryRow> rows;
  std::vector<RatioRecord> records;
  double seconds = 0.0;

  const SummaryRow& row(std::string_view method, std::size_t k = 0, std::size_t m = 0) const {
    for (const auto& r : rows) {
      if (r.method == method && r.k == k && r.m == m) return r;
    }
    throw std::out_of_range("no summary row for " + std::string(method));
  }
};

namespace detail {

inline std::shared_ptr<const Graph> experiment_graph(const ExperimentConfig& cfg) {
  if (cfg.graph_type == "er") {
    return std::make_shared<const Graph>(generate_er(cfg.nodes, cfg.edges, derive_seed(cfg.master_seed, "graph")));
  }
  std::ifstream in(cfg.graph_file);
  if (!in) throw std::runtime_error("cannot open graph file " + cfg.graph_file);
  return std::make_shared<const Graph>(load_edge_list(in, true).graph);
}

inline std::vector<QueryDecisionPair> prefix_pairs(const std::vector<QueryDecisionPair>& pairs, std::size_t m) {
  return {pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(std::min(m, pairs.size()))};
}

}  // namespace detail

/// Full protocol: fixed graph and true model; per repetition a fresh training
/// pool, test pool, and hypothesis bank; trains for every (K, m) and scores
/// initial weights, trained weights, and the baselines on every test query.
/// Deterministic given the master seed.
inline EvaluationReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  const auto seed = cfg.master_seed;
  const auto graph = detail::experiment_graph(cfg);
  const auto truth = build_true_model(graph, derive_seed(seed, "true-model"));
  const auto empirical = cfg.empirical.random ? random_model(graph, derive_seed(seed, "empirical"))
                                              : perturb_model(truth, cfg.empirical.q, derive_seed(seed, "empirical"));
  const auto max_k = *std::max_element(cfg.k_list.begin(), cfg.k_list.end());
  const auto max_m = *std::max_element(cfg.m_list.begin(), cfg.m_list.end());
  const double inference_ratio = 1.0 - 1.0 / M_E;

  EvaluationReport report;
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    const auto train_pool = generate_pairs(truth, cfg.source_task, max_m, cfg.pair_eval_bank,
                                           derive_seed(seed, "train-pairs", rep));
    const auto test_pool = generate_pairs(truth, cfg.target_task, cfg.test_size, cfg.pair_eval_bank,
                                          derive_seed(seed, "test-pairs", rep));
    const auto full_bank = sample_bank(empirical, max_k, derive_seed(seed, "bank", rep));

    struct Predictor {
      std::string method;
      std::size_t k, m;
      std::function<NodeSet(const QueryDecisionPair&, std::size_t)> predict;
    };
    std::vector<Predictor> predictors;
    std::vector<std::shared_ptr<RealizationBank>> banks;
    for (auto k : cfg.k_list) {
      auto bank = std::make_shared<RealizationBank>(full_bank.prefix(k));
      banks.push_back(bank);
      auto initial = std::make_shared<HypothesisWeights>(
          initial_weights(*bank, cfg.source_task, cfg.target_task, cfg.trainer));
      predictors.push_back({"si-initial", k, 0, [bank, initial](const QueryDecisionPair& q, std::size_t) {
                              return infer(*initial, *bank, q.x, q.budget);
                            }});
      for (auto m : cfg.m_list) {
        auto trainer_cfg = cfg.trainer;
        trainer_cfg.seed = derive_seed(seed, "trainer", rep * 1000003 + k * 1009 + m);
        auto trained = std::make_shared<HypothesisWeights>(
            train(detail::prefix_pairs(train_pool, m), *bank, cfg.source_task, cfg.target_task, trainer_cfg));
        if (cfg.sample_final) {
          const double gamma = gamma_value(trained->w, m, cfg.beta, inference_ratio);
          trained->w = sample_final_weights(trained->w, gamma, derive_seed(trainer_cfg.seed, "final"));
        }
        predictors.push_back({"si-final", k, m, [bank, trained](const QueryDecisionPair& q, std::size_t) {
                                return infer(*trained, *bank, q.x, q.budget);
                              }});
      }
    }
    if (cfg.baselines) {
      predictors.push_back({"hd", 0, 0, [graph](const QueryDecisionPair& q, std::size_t) {
                              return hd_predict(*graph, q.budget);
                            }});
      const auto random_seed = derive_seed(seed, "random", rep);
      predictors.push_back({"random", 0, 0, [graph, random_seed](const QueryDecisionPair& q, std::size_t i) {
                              return random_predict(*graph, q.budget, derive_seed(random_seed, "query", i));
                            }});
      for (auto m : cfg.m_list) {
        auto nb = std::make_shared<NaiveBayesModel>(nb_train(detail::prefix_pairs(train_pool, m), graph->node_count()));
        predictors.push_back({"nb", 0, m, [nb](const QueryDecisionPair& q, std::size_t) {
                                return nb_predict(*nb, q.x, q.budget);
                              }});
      }
    }

    const auto eval_seed = derive_seed(seed, "eval", rep);
    std::vector<std::vector<Ratio>> ratios(test_pool.size());
    parallel_for(test_pool.size(), [&](std::size_t i) {
      const auto& q = test_pool[i];
      const auto eval_bank = sample_bank(truth, cfg.eval_samples, derive_seed(eval_seed, "query", i));
      const RatioEvaluator evaluator(eval_bank, cfg.target_task, q.x, q.y);
      ratios[i].reserve(predictors.size());
      for (const auto& p : predictors) ratios[i].push_back(evaluator.ratio(p.predict(q, i)));
    });
    for (std::size_t i = 0; i < test_pool.size(); ++i) {
      for (std::size_t j = 0; j < predictors.size(); ++j) {
        report.records.push_back({rep, i, predictors[j].method, predictors[j].k, predictors[j].m, ratios[i][j]});
      }
    }
  }

  // Aggregate in record order: mean per repetition, then mean/std across repetitions.
  std::map<std::tuple<std::string, std::size_t, std::size_t>, std::size_t> index;
  std::vector<std::vector<std::pair<double, std::size_t>>> sums;  // per row, per rep (sum, count)
  for (const auto& r : report.records) {
    const auto key = std::make_tuple(r.method, r.k, r.m);
    auto [it, fresh] = index.try_emplace(key, report.rows.size());
    if (fresh) {
      SummaryRow fresh_row;
      fresh_row.method = r.method;
      fresh_row.k = r.k;
      fresh_row.m = r.m;
      report.rows.push_back(std::move(fresh_row));
      sums.emplace_back(cfg.repetitions, std::make_pair(0.0, std::size_t{0}));
    }
    auto& row = report.rows[it->second];
    if (r.ratio.degenerate) {
      ++row.degenerate;
      continue;
    }
    if (r.ratio.value > 1.0) ++row.above_one;
    sums[it->second][r.repetition].first += r.ratio.value;
    ++sums[it->second][r.repetition].second;
  }
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    auto& row = report.rows[i];
    for (const auto& [sum, count] : sums[i]) {
      if (count > 0) row.repetition_means.push_back(sum / static_cast<double>(count));
    }
    const auto n = static_cast<double>(row.repetition_means.size());
    if (n == 0) continue;
    for (double v : row.repetition_means) row.mean += v;
    row.mean /= n;
    if (n > 1) {
      double ss = 0.0;
      for (double v : row.repetition_means) ss += (v - row.mean) * (v - row.mean);
      row.stddev = std::sqrt(ss / (n - 1.0));
    }
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

/// One JSON object per line per evaluated (repetition, query, method). No
/// timing information, so reruns are byte-identical.
inline void write_report_records(std::ostream& out, const EvaluationReport& report) {
  for (const auto& r : report.rows) {
    nlohmann::ordered_json j;
    j["type"] = "summary";
    j["method"] = r.method;
    j["k"] = r.k;
    j["m"] = r.m;
    j["mean"] = r.mean;
    j["std"] = r.stddev;
    j["repetition_means"] = r.repetition_means;
    j["degenerate"] = r.degenerate;
    j["above_one"] = r.above_one;
    out << j.dump() << '\n';
  }
  for (const auto& r : report.records) {
    nlohmann::ordered_json j;
    j["type"] = "ratio";
    j["rep"] = r.repetition;
    j["query"] = r.query;
    j["method"] = r.method;
    j["k"] = r.k;
    j["m"] = r.m;
    if (r.ratio.degenerate) j["ratio"] = nullptr;
    else j["ratio"] = r.ratio.value;
    j["degenerate"] = r.ratio.degenerate;
    j["above_one"] = !r.ratio.degenerate && r.ratio.value > 1.0;
    out << j.dump() << '\n';
  }
}

inline void write_report_table(std::ostream& out, const ExperimentConfig& cfg, const EvaluationReport& report) {
  out << to_string(cfg.source_task) << " -> " << to_string(cfg.target_task) << ", empirical " << cfg.empirical.label()
      << ", " << cfg.repetitions << " repetitions, " << cfg.test_size << " test queries\n";
  out << std::left << std::setw(12) << "method" << std::right << std::setw(6) << "K" << std::setw(7) << "m"
      << std::setw(10) << "mean" << std::setw(10) << "std" << std::setw(8) << ">1" << std::setw(8) << "degen" << '\n';
  out << std::fixed << std::setprecision(3);
  for (const auto& r : report.rows) {
    out << std::left << std::setw(12) << r.method << std::right << std::setw(6)
        << (r.k ? std::to_string(r.k) : "-") << std::setw(7) << (r.m ? std::to_string(r.m) : "-") << std::setw(10)
        << r.mean << std::setw(10) << r.stddev << std::setw(8) << r.above_one << std::setw(8) << r.degenerate << '\n';
  }
  out << std::setprecision(1) << "elapsed " << report.seconds << " s\n";
  out.unsetf(std::ios::fixed);
}

}  // namespace sinv
