// sinv: command-line front end for the social-inverse pipeline.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sinv/sinv.hpp"

using namespace sinv;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::shared_ptr<const Graph> read_graph_file(const std::string& path) {
  auto in = open_in(path);
  auto loaded = load_edge_list(in);
  return std::make_shared<const Graph>(std::move(loaded.graph));
}

DiffusionModel read_model_file(const std::string& path) {
  auto in = open_in(path);
  return read_model(in);
}

RealizationBank read_bank_file(const std::string& path) {
  auto in = open_in(path);
  return read_bank(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse decision-making for contagion management"};
  app.require_subcommand(1);

  // gen-graph
  std::string graph_type = "er", out_path;
  std::size_t nodes = 512;
  std::uint64_t edges = 650, seed = 1;
  auto* gen_graph = app.add_subcommand("gen-graph", "Generate a random directed graph");
  gen_graph->add_option("--type", graph_type, "Generator (er)")->check(CLI::IsMember({"er"}));
  gen_graph->add_option("--nodes", nodes, "Node count");
  gen_graph->add_option("--edges", edges, "Expected edge count");
  gen_graph->add_option("--seed", seed, "Random seed");
  gen_graph->add_option("--out", out_path, "Output edge list")->required();

  // load
  std::string edges_path;
  bool remap = false;
  auto* load = app.add_subcommand("load", "Load an edge list and print a summary");
  load->add_option("--edges", edges_path, "Edge list file")->required();
  load->add_flag("--remap", remap, "Renumber node ids in order of appearance");
  load->add_option("--out", out_path, "Write the cleaned graph here");

  // gen-model / random-model
  std::string graph_path;
  auto* gen_model = app.add_subcommand("gen-model", "Draw the ground-truth diffusion model for a graph");
  gen_model->add_option("--graph", graph_path, "Edge list")->required();
  gen_model->add_option("--seed", seed, "Random seed");
  gen_model->add_option("--out", out_path, "Output model file")->required();

  auto* rand_model = app.add_subcommand("random-model", "Draw a fully random diffusion model");
  rand_model->add_option("--graph", graph_path, "Edge list")->required();
  rand_model->add_option("--seed", seed, "Random seed");
  rand_model->add_option("--out", out_path, "Output model file")->required();

  // perturb
  std::string model_path;
  double q = 0.1;
  auto* perturb = app.add_subcommand("perturb", "Perturb every model parameter by a relative level");
  perturb->add_option("--model", model_path, "Model file")->required();
  perturb->add_option("--q", q, "Perturbation level")->required();
  perturb->add_option("--seed", seed, "Random seed");
  perturb->add_option("--out", out_path, "Output model file")->required();

  // gen-pairs
  std::string task_name = "dc";
  std::size_t count = 10, eval_bank = 200;
  auto* gen_pairs = app.add_subcommand("gen-pairs", "Generate query-decision pairs under a model");
  gen_pairs->add_option("--model", model_path, "Model file")->required();
  gen_pairs->add_option("--task", task_name, "Task (de or dc)");
  gen_pairs->add_option("--count", count, "Number of pairs");
  gen_pairs->add_option("--eval-bank", eval_bank, "Realizations used to solve each query");
  gen_pairs->add_option("--seed", seed, "Random seed");
  gen_pairs->add_option("--out", out_path, "Output pairs file")->required();

  // sample-bank
  std::size_t k = 30;
  auto* sample = app.add_subcommand("sample-bank", "Sample a bank of realizations from a model");
  sample->add_option("--model", model_path, "Model file")->required();
  sample->add_option("--k", k, "Number of realizations");
  sample->add_option("--seed", seed, "Random seed");
  sample->add_option("--out", out_path, "Output bank file")->required();

  // train
  std::string pairs_path, bank_path, source_name = "dc", target_name = "de", method_name = "subgradient";
  TrainerConfig tcfg;
  auto* train_cmd = app.add_subcommand("train", "Learn realization weights from source-task pairs");
  train_cmd->add_option("--pairs", pairs_path, "Pairs file")->required();
  train_cmd->add_option("--bank", bank_path, "Bank file")->required();
  train_cmd->add_option("--source", source_name, "Source task");
  train_cmd->add_option("--target", target_name, "Target task");
  train_cmd->add_option("--c", tcfg.c, "Slack trade-off C");
  train_cmd->add_option("--cstar", tcfg.c_star, "Margin coefficient C*");
  train_cmd->add_option("--method", method_name, "subgradient or n_slack");
  train_cmd->add_option("--epochs", tcfg.epochs, "Epoch cap");
  train_cmd->add_option("--step", tcfg.step_scale, "Initial step size");
  train_cmd->add_option("--tolerance", tcfg.tolerance, "Relative violation tolerance");
  train_cmd->add_option("--seed", tcfg.seed, "Shuffle seed");
  train_cmd->add_option("--out", out_path, "Output weights file")->required();

  // predict
  std::string weights_path, query_text;
  std::size_t budget = 10;
  auto* predict = app.add_subcommand("predict", "Infer a target-task decision for a query");
  predict->add_option("--weights", weights_path, "Weights file")->required();
  predict->add_option("--bank", bank_path, "Bank file the weights were trained on")->required();
  predict->add_option("--query", query_text, "Query nodes, comma separated")->required();
  predict->add_option("--budget", budget, "Decision budget")->required();

  // evaluate
  std::string config_path, report_path;
  auto* evaluate = app.add_subcommand("evaluate", "Run the full experiment protocol");
  evaluate->add_option("--config", config_path, "Experiment config")->required();
  evaluate->add_option("--report", report_path, "JSONL report path (table goes to <report>.txt)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_graph) {
      auto g = generate_er(nodes, edges, seed);
      auto out = open_out(out_path);
      write_edge_list(out, g);
      std::cout << "nodes " << g.node_count() << " edges " << g.edge_count() << " hash " << hex64(g.hash()) << '\n';
    } else if (*load) {
      auto in = open_in(edges_path);
      auto loaded = load_edge_list(in, remap);
      const auto& g = loaded.graph;
      std::cout << "nodes " << g.node_count() << " edges " << g.edge_count() << " duplicates_dropped "
                << loaded.duplicates_dropped << " self_loops_dropped " << loaded.self_loops_dropped << " hash "
                << hex64(g.hash()) << '\n';
      if (!out_path.empty()) {
        auto out = open_out(out_path);
        write_edge_list(out, g);
      }
    } else if (*gen_model || *rand_model) {
      auto g = read_graph_file(graph_path);
      auto m = *gen_model ? build_true_model(g, seed) : random_model(g, seed);
      auto out = open_out(out_path);
      write_model(out, m);
      std::cout << "model " << m.descriptor() << " hash " << hex64(m.hash()) << '\n';
    } else if (*perturb) {
      auto m = perturb_model(read_model_file(model_path), q, seed);
      auto out = open_out(out_path);
      write_model(out, m);
      std::cout << "model " << m.descriptor() << " hash " << hex64(m.hash()) << '\n';
    } else if (*gen_pairs) {
      auto m = read_model_file(model_path);
      auto pairs = generate_pairs(m, parse_task(task_name), count, eval_bank, seed);
      auto out = open_out(out_path);
      write_pairs(out, pairs);
      std::cout << "pairs " << pairs.size() << '\n';
    } else if (*sample) {
      auto bank = sample_bank(read_model_file(model_path), k, seed);
      auto out = open_out(out_path);
      write_bank(out, bank);
      std::cout << "bank k " << bank.size() << " hash " << hex64(bank.hash()) << '\n';
    } else if (*train_cmd) {
      auto in = open_in(pairs_path);
      auto pairs = read_pairs(in);
      auto bank = read_bank_file(bank_path);
      tcfg.method = parse_train_method(method_name);
      auto report = train_with_report(pairs, bank, parse_task(source_name), parse_task(target_name), tcfg);
      auto out = open_out(out_path);
      write_weights(out, report.weights);
      std::cout << "epochs " << report.epochs_run << " objective " << format_double(report.objective_trace.front())
                << " -> " << format_double(*std::min_element(report.objective_trace.begin(),
                                                             report.objective_trace.end()))
                << '\n';
    } else if (*predict) {
      auto in = open_in(weights_path);
      auto h = read_weights(in);
      auto bank = read_bank_file(bank_path);
      std::cout << format_node_list(infer(h, bank, parse_node_list(query_text), budget)) << '\n';
    } else if (*evaluate) {
      auto in = open_in(config_path);
      auto cfg = parse_experiment_config(in);
      auto report = run_experiment(cfg);
      {
        auto out = open_out(report_path);
        write_report_records(out, report);
      }
      std::ostringstream table;
      write_report_table(table, cfg, report);
      auto txt = open_out(report_path + ".txt");
      txt << table.str();
      std::cout << table.str();
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
