#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sinv/util.hpp"

namespace sinv {

struct Edge {
  NodeId from;
  NodeId to;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Immutable directed graph with dense ids in [0, node_count) and edges in
/// canonical (from, to) order, so edge indices are stable.
class Graph {
 public:
  Graph() : out_offsets_(1, 0), in_offsets_(1, 0) {}

  /// Throws std::invalid_argument on self-loops, duplicates, or ids out of range.
  Graph(std::size_t node_count, std::vector<Edge> edges)
      : node_count_(node_count), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const auto& e = edges_[i];
      if (e.from >= node_count_ || e.to >= node_count_) {
        throw std::invalid_argument("edge endpoint out of range");
      }
      if (e.from == e.to) throw std::invalid_argument("self-loop");
      if (i > 0 && edges_[i - 1] == e) throw std::invalid_argument("duplicate edge");
    }
    if (edges_.size() > std::numeric_limits<EdgeId>::max()) {
      throw std::invalid_argument("too many edges");
    }

    out_offsets_.assign(node_count_ + 1, 0);
    in_offsets_.assign(node_count_ + 1, 0);
    for (const auto& e : edges_) {
      ++out_offsets_[e.from + 1];
      ++in_offsets_[e.to + 1];
    }
    for (std::size_t v = 0; v < node_count_; ++v) {
      out_offsets_[v + 1] += out_offsets_[v];
      in_offsets_[v + 1] += in_offsets_[v];
    }
    // Sorted edges put each node's out-edges in one contiguous run.
    in_edges_.resize(edges_.size());
    std::vector<std::size_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      in_edges_[cursor[edges_[i].to]++] = static_cast<EdgeId>(i);
    }

    Fnv1a h;
    h.u64(node_count_);
    for (const auto& e : edges_) {
      h.u64(e.from);
      h.u64(e.to);
    }
    hash_ = h.value();
  }

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  /// Edge indices [first, last) leaving `v`.
  std::pair<EdgeId, EdgeId> out_edge_range(NodeId v) const {
    return {static_cast<EdgeId>(out_offsets_[v]), static_cast<EdgeId>(out_offsets_[v + 1])};
  }
  /// Indices of edges entering `v`, ordered by source id.
  std::span<const EdgeId> in_edges(NodeId v) const {
    return std::span<const EdgeId>(in_edges_).subspan(in_offsets_[v],
                                                      in_offsets_[v + 1] - in_offsets_[v]);
  }

  std::size_t out_degree(NodeId v) const { return out_offsets_[v + 1] - out_offsets_[v]; }
  std::size_t in_degree(NodeId v) const { return in_offsets_[v + 1] - in_offsets_[v]; }

  std::vector<NodeId> out_neighbors(NodeId v) const {
    std::vector<NodeId> out;
    for (auto e = out_offsets_[v]; e < out_offsets_[v + 1]; ++e) out.push_back(edges_[e].to);
    return out;
  }
  std::vector<NodeId> in_neighbors(NodeId v) const {
    std::vector<NodeId> out;
    for (auto e : in_edges(v)) out.push_back(edges_[e].from);
    return out;
  }

  std::optional<EdgeId> find_edge(NodeId from, NodeId to) const {
    if (from >= node_count_) return std::nullopt;
    auto first = edges_.begin() + out_offsets_[from];
    auto last = edges_.begin() + out_offsets_[from + 1];
    auto it = std::lower_bound(first, last, Edge{from, to});
    if (it == last || it->to != to) return std::nullopt;
    return static_cast<EdgeId>(it - edges_.begin());
  }

  bool valid(NodeId v) const { return v < node_count_; }

  /// Content hash over node count and the canonical edge list.
  std::uint64_t hash() const { return hash_; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<EdgeId> in_edges_;
  std::uint64_t hash_ = 0;
};

struct LoadedGraph {
  Graph graph;
  std::size_t duplicates_dropped = 0;
  std::size_t self_loops_dropped = 0;
  /// original_ids[i] is the input id of node i when ids were remapped; empty otherwise.
  std::vector<std::uint64_t> original_ids;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::uint64_t parse_id(std::string_view tok, std::size_t line) {
  if (!tok.empty() && tok.front() == '-') throw ParseError(line, "negative node id");
  std::uint64_t v{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected integer node id, got '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace detail

/// Parses "u v" lines. Lines starting with '#' are comments, except that a
/// "# nodes: N" comment fixes the node count (so trailing isolated nodes
/// survive a round trip). Self-loops and duplicate edges are dropped and counted.
/// With `remap`, ids are compacted to [0, n) in order of first appearance.
inline LoadedGraph load_edge_list(std::istream& in, bool remap = false) {
  LoadedGraph result;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::optional<std::uint64_t> declared_nodes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = detail::trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      auto body = detail::trim(text.substr(1));
      constexpr std::string_view key = "nodes:";
      if (body.starts_with(key)) {
        declared_nodes = detail::parse_id(detail::trim(body.substr(key.size())), line_no);
      }
      continue;
    }
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto b = text.find_first_not_of(" \t", pos);
      if (b == std::string_view::npos) break;
      auto e = text.find_first_of(" \t", b);
      if (e == std::string_view::npos) e = text.size();
      tokens.push_back(text.substr(b, e - b));
      pos = e;
    }
    if (tokens.size() != 2) throw ParseError(line_no, "expected two node ids");
    raw.emplace_back(detail::parse_id(tokens[0], line_no), detail::parse_id(tokens[1], line_no));
  }

  std::size_t node_count = 0;
  if (remap) {
    std::map<std::uint64_t, NodeId> ids;
    auto intern = [&](std::uint64_t x) {
      auto [it, fresh] = ids.try_emplace(x, static_cast<NodeId>(ids.size()));
      if (fresh) result.original_ids.push_back(x);
      return it->second;
    };
    for (auto& [u, v] : raw) {
      u = intern(u);
      v = intern(v);
    }
    node_count = ids.size();
  } else {
    for (const auto& [u, v] : raw) node_count = std::max<std::size_t>(node_count, std::max(u, v) + 1);
    if (declared_nodes) {
      if (*declared_nodes < node_count) throw ParseError(line_no, "node id exceeds declared node count");
      node_count = *declared_nodes;
    }
    if (node_count > std::numeric_limits<NodeId>::max()) throw ParseError(line_no, "node id too large");
  }

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [u, v] : raw) {
    if (u == v) {
      ++result.self_loops_dropped;
      continue;
    }
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  std::sort(edges.begin(), edges.end());
  const auto before = edges.size();
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  result.duplicates_dropped = before - edges.size();
  result.graph = Graph(node_count, std::move(edges));
  return result;
}

inline LoadedGraph load_edge_list(std::string_view text, bool remap = false) {
  std::istringstream in{std::string(text)};
  return load_edge_list(in, remap);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes: " << g.node_count() << "\n";
  out << "# edges: " << g.edge_count() << "\n";
  for (const auto& e : g.edges()) out << e.from << ' ' << e.to << '\n';
}

/// G(n, p) with p = expected_edges / (n(n-1)): every ordered pair is an
/// independent Bernoulli(p) trial. Trials are enumerated by geometric skips,
/// which has the same law as drawing each pair but costs O(n + |E|).
inline Graph generate_er(std::size_t n, std::uint64_t expected_edges, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("generate_er: need at least 2 nodes");
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
  if (static_cast<double>(expected_edges) > pairs) {
    throw std::invalid_argument("generate_er: expected_edges exceeds n(n-1)");
  }
  const double p = static_cast<double>(expected_edges) / pairs;
  std::vector<Edge> edges;
  auto emit = [&](std::uint64_t slot) {
    const auto u = static_cast<NodeId>(slot / (n - 1));
    auto v = static_cast<NodeId>(slot % (n - 1));
    if (v >= u) ++v;
    edges.push_back({u, v});
  };
  const auto total = static_cast<std::uint64_t>(n) * (n - 1);
  if (p >= 1.0) {
    for (std::uint64_t s = 0; s < total; ++s) emit(s);
  } else if (p > 0.0) {
    auto rng = make_rng(seed);
    const double log_q = std::log1p(-p);
    std::uint64_t slot = 0;
    while (true) {
      const double skip = std::floor(std::log(uniform_open01(rng)) / log_q);
      if (skip >= static_cast<double>(total - slot)) break;
      slot += static_cast<std::uint64_t>(skip);
      emit(slot);
      ++slot;
      if (slot >= total) break;
    }
  }
  return Graph(n, std::move(edges));
}

/// The k nodes of largest in+out degree, ordered by (-degree, id).
inline std::vector<NodeId> top_degree_nodes(const Graph& g, std::size_t k) {
  if (k > g.node_count()) throw std::invalid_argument("top_degree_nodes: k exceeds node count");
  std::vector<NodeId> nodes(g.node_count());
  for (std::size_t v = 0; v < nodes.size(); ++v) nodes[v] = static_cast<NodeId>(v);
  auto degree = [&](NodeId v) { return g.in_degree(v) + g.out_degree(v); };
  std::partial_sort(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(k), nodes.end(),
                    [&](NodeId a, NodeId b) {
                      const auto da = degree(a), db = degree(b);
                      return da != db ? da > db : a < b;
                    });
  nodes.resize(k);
  return nodes;
}

}  // namespace sinv
