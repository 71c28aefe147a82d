#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "circlecomm/graph.hpp"
#include "circlecomm/impulse.hpp"
#include "circlecomm/latent.hpp"
#include "circlecomm/rng.hpp"

namespace testing {

using circlecomm::Graph;
using circlecomm::Vertex;

std::filesystem::path data_dir();
Graph karate();

Graph make_graph(std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& edges,
                 circlecomm::AdjacencyMode mode = circlecomm::AdjacencyMode::binary);
/// Two disjoint cliques of `size` vertices: 0..size-1 and size..2*size-1.
Graph two_cliques(std::size_t size);
Graph complete(std::size_t n);
/// Erdos-Renyi G(n, p); count mode draws weights 0..3 instead.
Graph random_graph(std::size_t n, double p, circlecomm::AdjacencyMode mode, circlecomm::Rng& rng);
circlecomm::LatentState random_state(std::size_t n, circlecomm::Rng& rng);

/// The twelve-vertex, four-cluster benchmark: clusters of three at angles
/// 0, π/2, π, 3π/2, sequential impulses (N = 200, T = 1) with generator link h^8.
struct PlantedGraph {
  Graph graph;
  std::vector<int> truth;
};
PlantedGraph four_cluster_benchmark(std::uint64_t seed);

}  // namespace testing
