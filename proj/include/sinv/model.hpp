#pragma once

#include <cmath>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinv/graph.hpp"
#include "sinv/util.hpp"

namespace sinv {

/// Independent-cascade activation probability plus Weibull(shape, scale)
/// transmission time for one edge.
struct EdgeParams {
  double prob = 0.0;
  double shape = 1.0;
  double scale = 1.0;
};

inline constexpr double kMinWeibullParam = 1e-6;

/// Per-edge diffusion parameters over a shared graph. Also serves as the
/// distribution realizations are drawn from.
class DiffusionModel {
 public:
  DiffusionModel(std::shared_ptr<const Graph> graph, std::vector<EdgeParams> params,
                 std::string descriptor, std::uint64_t seed)
      : graph_(std::move(graph)),
        params_(std::move(params)),
        descriptor_(std::move(descriptor)),
        seed_(seed) {
    if (!graph_) throw std::invalid_argument("DiffusionModel: null graph");
    if (params_.size() != graph_->edge_count()) {
      throw std::invalid_argument("DiffusionModel: one parameter triple per edge required");
    }
    for (const auto& p : params_) {
      if (!(p.prob >= 0.0 && p.prob <= 1.0)) throw std::invalid_argument("edge probability outside [0,1]");
      if (!(p.shape > 0.0) || !(p.scale > 0.0)) throw std::invalid_argument("Weibull parameters must be positive");
    }
    Fnv1a h;
    h.u64(graph_->hash());
    for (const auto& p : params_) {
      h.f64(p.prob);
      h.f64(p.shape);
      h.f64(p.scale);
    }
    hash_ = h.value();
  }

  const Graph& graph() const { return *graph_; }
  const std::shared_ptr<const Graph>& graph_ptr() const { return graph_; }
  std::span<const EdgeParams> params() const { return params_; }
  const EdgeParams& edge(EdgeId e) const { return params_[e]; }
  /// "true", "q=0.1", "random", ... for provenance.
  const std::string& descriptor() const { return descriptor_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t hash() const { return hash_; }

 private:
  std::shared_ptr<const Graph> graph_;
  std::vector<EdgeParams> params_;
  std::string descriptor_;
  std::uint64_t seed_ = 0;
  std::uint64_t hash_ = 0;
};

/// Weighted cascade probabilities p(v,u) = 1/|in(u)|; shape and scale drawn
/// uniformly from {1, ..., 10}.
inline DiffusionModel build_true_model(std::shared_ptr<const Graph> g, std::uint64_t seed) {
  if (!g || g->edge_count() == 0) throw std::invalid_argument("build_true_model: graph has no edges");
  auto rng = make_rng(seed);
  std::vector<EdgeParams> params(g->edge_count());
  for (EdgeId e = 0; e < params.size(); ++e) {
    params[e].prob = 1.0 / static_cast<double>(g->in_degree(g->edge(e).to));
    params[e].shape = static_cast<double>(1 + uniform_below(rng, 10));
    params[e].scale = static_cast<double>(1 + uniform_below(rng, 10));
  }
  return DiffusionModel(std::move(g), std::move(params), "true", seed);
}

/// Redraws every parameter uniformly from [x(1-q), x(1+q)].
inline DiffusionModel perturb_model(const DiffusionModel& m, double q, std::uint64_t seed) {
  if (!(q > 0.0)) throw std::invalid_argument("perturb_model: q must be positive");
  auto rng = make_rng(seed);
  auto redraw = [&](double x) { return uniform_real(rng, x * (1.0 - q), x * (1.0 + q)); };
  std::vector<EdgeParams> params(m.params().begin(), m.params().end());
  for (auto& p : params) {
    p.prob = std::clamp(redraw(p.prob), 0.0, 1.0);
    p.shape = std::max(redraw(p.shape), kMinWeibullParam);
    p.scale = std::max(redraw(p.scale), kMinWeibullParam);
  }
  return DiffusionModel(m.graph_ptr(), std::move(params), "q=" + format_double(q), seed);
}

/// Every parameter uniform on [0, 1], Weibull parameters floored.
inline DiffusionModel random_model(std::shared_ptr<const Graph> g, std::uint64_t seed) {
  if (!g || g->edge_count() == 0) throw std::invalid_argument("random_model: graph has no edges");
  auto rng = make_rng(seed);
  std::vector<EdgeParams> params(g->edge_count());
  for (auto& p : params) {
    p.prob = uniform01(rng);
    p.shape = std::max(uniform01(rng), kMinWeibullParam);
    p.scale = std::max(uniform01(rng), kMinWeibullParam);
  }
  return DiffusionModel(std::move(g), std::move(params), "random", seed);
}

// Model file:
//   sinv-model 1
//   descriptor <text>
//   seed <n>
//   graph_hash <hex>
//   nodes <n>
//   edges <m>
//   <u> <v> <p> <shape> <scale>     (m lines, canonical edge order)

inline void write_model(std::ostream& out, const DiffusionModel& m) {
  const auto& g = m.graph();
  out << "sinv-model 1\n";
  out << "descriptor " << m.descriptor() << "\n";
  out << "seed " << m.seed() << "\n";
  out << "graph_hash " << hex64(g.hash()) << "\n";
  out << "nodes " << g.node_count() << "\n";
  out << "edges " << g.edge_count() << "\n";
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto& p = m.edge(e);
    out << g.edge(e).from << ' ' << g.edge(e).to << ' ' << format_double(p.prob) << ' '
        << format_double(p.shape) << ' ' << format_double(p.scale) << '\n';
  }
}

namespace detail {

inline std::string expect_field(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("unexpected end of file, wanted '" + key + "'");
  if (!line.starts_with(key + " ")) throw std::runtime_error("expected '" + key + "', got '" + line + "'");
  return line.substr(key.size() + 1);
}

inline std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::runtime_error("bad integer '" + s + "'");
  return v;
}

}  // namespace detail

inline DiffusionModel read_model(std::istream& in) {
  std::string magic;
  std::getline(in, magic);
  if (magic != "sinv-model 1") throw std::runtime_error("not a model file");
  auto descriptor = detail::expect_field(in, "descriptor");
  const auto seed = detail::to_u64(detail::expect_field(in, "seed"));
  const auto graph_hash = parse_hex64(detail::expect_field(in, "graph_hash"));
  const auto nodes = detail::to_u64(detail::expect_field(in, "nodes"));
  const auto edge_count = detail::to_u64(detail::expect_field(in, "edges"));
  std::vector<Edge> edges(edge_count);
  std::vector<EdgeParams> params(edge_count);
  for (std::size_t i = 0; i < edge_count; ++i) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("model file truncated");
    std::istringstream row(line);
    std::string p, a, b;
    if (!(row >> edges[i].from >> edges[i].to >> p >> a >> b)) throw std::runtime_error("bad model row: " + line);
    params[i] = {parse_double(p), parse_double(a), parse_double(b)};
  }
  auto g = std::make_shared<const Graph>(nodes, edges);
  if (g->hash() != graph_hash) throw std::runtime_error("model file graph hash mismatch");
  // Graph() sorts edges; rows are written in canonical order so params line up.
  for (std::size_t i = 0; i < edge_count; ++i) {
    if (!(g->edge(static_cast<EdgeId>(i)) == edges[i])) throw std::runtime_error("model rows not in canonical order");
  }
  return DiffusionModel(std::move(g), std::move(params), std::move(descriptor), seed);
}

}  // namespace sinv
