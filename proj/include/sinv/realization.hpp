#pragma once

#include <cmath>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinv/graph.hpp"
#include "sinv/model.hpp"
#include "sinv/util.hpp"

namespace sinv {

// Extreme Weibull shapes (down to 1e-6) can under/overflow the inverse CDF.
inline constexpr double kMinTravelTime = 1e-12;
inline constexpr double kMaxTravelTime = 1e12;

/// One sampled live-edge subgraph with positive travel times on live edges.
/// Diffusion on a realization is deterministic.
class Realization {
 public:
  /// `live` must be strictly increasing edge indices; `times` runs parallel to it.
  Realization(std::shared_ptr<const Graph> graph, std::vector<EdgeId> live, std::vector<double> times)
      : graph_(std::move(graph)), live_(std::move(live)), times_(std::move(times)) {
    if (!graph_) throw std::invalid_argument("Realization: null graph");
    if (live_.size() != times_.size()) throw std::invalid_argument("Realization: live/time size mismatch");
    for (std::size_t i = 0; i < live_.size(); ++i) {
      if (live_[i] >= graph_->edge_count()) throw std::invalid_argument("Realization: edge index out of range");
      if (i > 0 && live_[i] <= live_[i - 1]) throw std::invalid_argument("Realization: live edges not increasing");
      if (!(times_[i] > 0.0) || !std::isfinite(times_[i])) {
        throw std::invalid_argument("Realization: travel times must be positive and finite");
      }
    }
    build_adjacency();
  }

  const Graph& graph() const { return *graph_; }
  const std::shared_ptr<const Graph>& graph_ptr() const { return graph_; }
  std::size_t node_count() const { return graph_->node_count(); }
  std::span<const EdgeId> live_edges() const { return live_; }
  std::span<const double> travel_times() const { return times_; }

  struct Arc {
    NodeId node;
    double time;
  };
  /// Live out-arcs of v, ordered by target id.
  std::span<const Arc> out_arcs(NodeId v) const {
    return std::span<const Arc>(out_).subspan(out_off_[v], out_off_[v + 1] - out_off_[v]);
  }
  /// Live in-arcs of v, ordered by source id.
  std::span<const Arc> in_arcs(NodeId v) const {
    return std::span<const Arc>(in_).subspan(in_off_[v], in_off_[v + 1] - in_off_[v]);
  }

  bool is_live(EdgeId e) const { return std::binary_search(live_.begin(), live_.end(), e); }

 private:
  void build_adjacency() {
    const auto n = graph_->node_count();
    out_off_.assign(n + 1, 0);
    in_off_.assign(n + 1, 0);
    for (auto e : live_) {
      ++out_off_[graph_->edge(e).from + 1];
      ++in_off_[graph_->edge(e).to + 1];
    }
    for (std::size_t v = 0; v < n; ++v) {
      out_off_[v + 1] += out_off_[v];
      in_off_[v + 1] += in_off_[v];
    }
    out_.resize(live_.size());
    in_.resize(live_.size());
    std::vector<std::uint32_t> oc(out_off_.begin(), out_off_.end() - 1);
    std::vector<std::uint32_t> ic(in_off_.begin(), in_off_.end() - 1);
    for (std::size_t i = 0; i < live_.size(); ++i) {
      const auto& edge = graph_->edge(live_[i]);
      out_[oc[edge.from]++] = {edge.to, times_[i]};
      in_[ic[edge.to]++] = {edge.from, times_[i]};
    }
  }

  std::shared_ptr<const Graph> graph_;
  std::vector<EdgeId> live_;
  std::vector<double> times_;
  std::vector<std::uint32_t> out_off_, in_off_;
  std::vector<Arc> out_, in_;
};

/// Inverse-CDF Weibull draw: t = scale * (-ln U)^(1/shape).
inline double sample_weibull(Rng& rng, double shape, double scale) {
  const double t = scale * std::pow(-std::log(uniform_open01(rng)), 1.0 / shape);
  if (std::isnan(t)) return kMinTravelTime;
  return std::clamp(t, kMinTravelTime, kMaxTravelTime);
}

inline Realization sample_realization(const DiffusionModel& m, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::vector<EdgeId> live;
  std::vector<double> times;
  for (EdgeId e = 0; e < m.graph().edge_count(); ++e) {
    const auto& p = m.edge(e);
    if (uniform01(rng) < p.prob) {
      live.push_back(e);
      times.push_back(sample_weibull(rng, p.shape, p.scale));
    }
  }
  return Realization(m.graph_ptr(), std::move(live), std::move(times));
}

/// K realizations over one graph plus where they came from.
class RealizationBank {
 public:
  RealizationBank(std::vector<Realization> realizations, std::string model_descriptor,
                  std::uint64_t model_hash, std::uint64_t seed)
      : realizations_(std::move(realizations)),
        descriptor_(std::move(model_descriptor)),
        model_hash_(model_hash),
        seed_(seed) {
    if (realizations_.empty()) throw std::invalid_argument("RealizationBank: K must be at least 1");
    const auto& g = realizations_.front().graph_ptr();
    Fnv1a h;
    h.u64(g->hash());
    h.u64(realizations_.size());
    for (const auto& r : realizations_) {
      if (r.graph_ptr() != g && !(r.graph() == *g)) {
        throw std::invalid_argument("RealizationBank: realizations must share one graph");
      }
      h.u64(r.live_edges().size());
      for (std::size_t i = 0; i < r.live_edges().size(); ++i) {
        h.u64(r.live_edges()[i]);
        h.f64(r.travel_times()[i]);
      }
    }
    hash_ = h.value();
  }

  std::size_t size() const { return realizations_.size(); }
  const Realization& operator[](std::size_t i) const { return realizations_[i]; }
  auto begin() const { return realizations_.begin(); }
  auto end() const { return realizations_.end(); }
  const Graph& graph() const { return realizations_.front().graph(); }
  const std::shared_ptr<const Graph>& graph_ptr() const { return realizations_.front().graph_ptr(); }
  const std::string& model_descriptor() const { return descriptor_; }
  std::uint64_t model_hash() const { return model_hash_; }
  std::uint64_t seed() const { return seed_; }
  /// Content hash over the graph and every realization; weights files pin it.
  std::uint64_t hash() const { return hash_; }

  /// The first k realizations as a bank of their own.
  RealizationBank prefix(std::size_t k) const {
    if (k == 0 || k > size()) throw std::invalid_argument("RealizationBank::prefix: bad size");
    return RealizationBank(std::vector<Realization>(realizations_.begin(), realizations_.begin() + static_cast<std::ptrdiff_t>(k)),
                           descriptor_, model_hash_, seed_);
  }

 private:
  std::vector<Realization> realizations_;
  std::string descriptor_;
  std::uint64_t model_hash_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t hash_ = 0;
};

inline std::uint64_t realization_seed(std::uint64_t bank_seed, std::size_t index) {
  return derive_seed(bank_seed, "realization", index);
}

/// Realization i uses its own stream, so bank(seed, K) is a prefix of bank(seed, K') for K' > K.
inline RealizationBank sample_bank(const DiffusionModel& m, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("sample_bank: K must be at least 1");
  std::vector<std::optional<Realization>> slots(k);
  parallel_for(k, [&](std::size_t i) { slots[i].emplace(sample_realization(m, realization_seed(seed, i))); });
  std::vector<Realization> out;
  out.reserve(k);
  for (auto& s : slots) out.push_back(std::move(*s));
  return RealizationBank(std::move(out), m.descriptor(), m.hash(), seed);
}

// Bank file:
//   sinv-bank 1
//   k <K>
//   graph_hash <hex>
//   model <descriptor>
//   model_hash <hex>
//   seed <n>
//   nodes <n>
//   edges <m>
//   <u> <v>                           (m lines)
//   realization <i> <live count>
//   <edge index> <travel time>        (live count lines)
//   ...

inline void write_bank(std::ostream& out, const RealizationBank& bank) {
  const auto& g = bank.graph();
  out << "sinv-bank 1\n";
  out << "k " << bank.size() << "\n";
  out << "graph_hash " << hex64(g.hash()) << "\n";
  out << "model " << bank.model_descriptor() << "\n";
  out << "model_hash " << hex64(bank.model_hash()) << "\n";
  out << "seed " << bank.seed() << "\n";
  out << "nodes " << g.node_count() << "\n";
  out << "edges " << g.edge_count() << "\n";
  for (const auto& e : g.edges()) out << e.from << ' ' << e.to << '\n';
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const auto& r = bank[i];
    out << "realization " << i << ' ' << r.live_edges().size() << '\n';
    for (std::size_t j = 0; j < r.live_edges().size(); ++j) {
      out << r.live_edges()[j] << ' ' << format_double(r.travel_times()[j]) << '\n';
    }
  }
}

inline RealizationBank read_bank(std::istream& in) {
  std::string magic;
  std::getline(in, magic);
  if (magic != "sinv-bank 1") throw std::runtime_error("not a realization bank file");
  const auto k = detail::to_u64(detail::expect_field(in, "k"));
  const auto graph_hash = parse_hex64(detail::expect_field(in, "graph_hash"));
  auto descriptor = detail::expect_field(in, "model");
  const auto model_hash = parse_hex64(detail::expect_field(in, "model_hash"));
  const auto seed = detail::to_u64(detail::expect_field(in, "seed"));
  const auto nodes = detail::to_u64(detail::expect_field(in, "nodes"));
  const auto edge_count = detail::to_u64(detail::expect_field(in, "edges"));
  std::vector<Edge> edges(edge_count);
  std::string line;
  for (auto& e : edges) {
    if (!std::getline(in, line)) throw std::runtime_error("bank file truncated");
    std::istringstream row(line);
    if (!(row >> e.from >> e.to)) throw std::runtime_error("bad edge row: " + line);
  }
  auto g = std::make_shared<const Graph>(nodes, std::move(edges));
  if (g->hash() != graph_hash) throw std::runtime_error("bank file graph hash mismatch");
  std::vector<Realization> realizations;
  realizations.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto header = detail::expect_field(in, "realization");
    std::istringstream hs(header);
    std::size_t index = 0, count = 0;
    if (!(hs >> index >> count) || index != i) throw std::runtime_error("bad realization header: " + header);
    std::vector<EdgeId> live(count);
    std::vector<double> times(count);
    for (std::size_t j = 0; j < count; ++j) {
      if (!std::getline(in, line)) throw std::runtime_error("bank file truncated");
      std::istringstream row(line);
      std::string t;
      if (!(row >> live[j] >> t)) throw std::runtime_error("bad realization row: " + line);
      times[j] = parse_double(t);
    }
    realizations.emplace_back(g, std::move(live), std::move(times));
  }
  return RealizationBank(std::move(realizations), std::move(descriptor), model_hash, seed);
}

}  // namespace sinv
