#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "circlecomm/trace.hpp"

namespace circlecomm {

enum class AdjacencyMode { binary, count };

const char* to_string(AdjacencyMode mode);
AdjacencyMode adjacency_mode_from_string(const std::string& name);

/// Undirected graph with a dense symmetric adjacency matrix.
///
/// Entries are 0/1 in binary mode and non-negative counts in count mode; the
/// diagonal is always zero. `origin()` maps each vertex to its id in the graph
/// it was extracted from, so results on an induced subgraph map back to the
/// parent.
class Graph {
 public:
  Graph() = default;
  Graph(std::size_t n, AdjacencyMode mode);

  std::size_t size() const noexcept { return n_; }
  AdjacencyMode mode() const noexcept { return mode_; }

  std::uint32_t weight(Vertex i, Vertex j) const { return adj_[i * n_ + j]; }
  bool linked(Vertex i, Vertex j) const { return weight(i, j) > 0; }

  /// Adds `w` to the (i, j) entry: accumulates in count mode, saturates at 1
  /// in binary mode. Self-loops are rejected.
  void add_edge(Vertex i, Vertex j, std::uint32_t w = 1);

  /// Distinct neighbors in the order their first edge was added.
  std::span<const Vertex> neighbors(Vertex i) const { return nbrs_[i]; }
  std::size_t degree(Vertex i) const { return nbrs_[i].size(); }
  /// Sum of row i of the adjacency matrix.
  std::uint64_t strength(Vertex i) const;
  /// Sum of the weights over unordered pairs.
  std::uint64_t total_weight() const;
  std::size_t edge_count() const;

  std::span<const Vertex> origin() const noexcept { return origin_; }
  void set_origin(std::vector<Vertex> origin);

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  void set_labels(std::vector<std::string> labels);
  /// Label of vertex i, or its index when unlabeled.
  std::string label(Vertex i) const;

  const std::optional<std::vector<int>>& ground_truth() const noexcept {
    return truth_;
  }
  void set_ground_truth(std::vector<int> truth);

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.mode_ == b.mode_ && a.adj_ == b.adj_;
  }

 private:
  std::size_t n_ = 0;
  AdjacencyMode mode_ = AdjacencyMode::binary;
  std::vector<std::uint32_t> adj_;
  std::vector<std::vector<Vertex>> nbrs_;
  std::vector<Vertex> origin_;
  std::vector<std::string> labels_;
  std::optional<std::vector<int>> truth_;
};

/// Whitespace-separated `u v [w]` lines; '#' starts a comment line. Vertices
/// are numbered by first appearance and the tokens kept as labels.
Graph parse_edge_list(std::istream& in, AdjacencyMode mode = AdjacencyMode::binary);

/// Minimal GML subset: node blocks (id, label, value) and edge blocks
/// (source, target). Node `value`s become ground-truth community ids, numbered
/// by first appearance of each distinct value.
Graph parse_gml(std::istream& in, AdjacencyMode mode = AdjacencyMode::binary);

/// Reads the JSON document produced by `to_json(const Graph&)`.
Graph graph_from_json(const nlohmann::json& doc);

/// Dispatches on extension: .gml, .json, anything else is an edge list.
Graph read_graph(const std::filesystem::path& path,
                 AdjacencyMode mode = AdjacencyMode::binary);

/// Subgraph on `vertices`, in the given order. origin() of the result refers
/// to g's origin ids, so nested extraction stays anchored to the root graph.
Graph induced_subgraph(const Graph& g, std::span<const Vertex> vertices);

/// Accumulates impulse contacts into an n-vertex graph. Contacts are
/// symmetrized; broadcasts become cliques (or stars) on center + recipients.
/// Binary output is min(count, 1).
Graph graph_from_impulses(std::span<const ImpulseTrace> traces, std::size_t n,
                          AdjacencyMode output_mode,
                          BroadcastEdges broadcast = BroadcastEdges::clique);

nlohmann::json to_json(const Graph& g);
void write_edge_list(std::ostream& out, const Graph& g);
void write_gml(std::ostream& out, const Graph& g);
void write_dot(std::ostream& out, const Graph& g);

}  // namespace circlecomm
