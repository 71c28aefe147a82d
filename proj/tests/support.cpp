#include "support.hpp"

#include <cstdlib>

namespace testing {

using namespace circlecomm;

std::filesystem::path data_dir() {
  if (const char* dir = std::getenv("CIRCLECOMM_DATA_DIR")) return dir;
  return CIRCLECOMM_DATA_DIR;
}

Graph karate() { return read_graph(data_dir() / "karate.gml"); }

Graph make_graph(std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& edges,
                 AdjacencyMode mode) {
  Graph g(n, mode);
  for (auto [a, b] : edges) g.add_edge(a, b);
  return g;
}

Graph two_cliques(std::size_t size) {
  Graph g(2 * size, AdjacencyMode::binary);
  for (std::size_t base : {std::size_t{0}, size})
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = i + 1; j < size; ++j) g.add_edge(base + i, base + j);
  return g;
}

Graph complete(std::size_t n) {
  Graph g(n, AdjacencyMode::binary);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

Graph random_graph(std::size_t n, double p, AdjacencyMode mode, Rng& rng) {
  Graph g(n, mode);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (mode == AdjacencyMode::count) {
        g.add_edge(i, j, static_cast<std::uint32_t>(uniform_index(rng, 4)));
      } else if (bernoulli(rng, p)) {
        g.add_edge(i, j);
      }
    }
  return g;
}

LatentState random_state(std::size_t n, Rng& rng) {
  std::vector<Vertex> v(n);
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = i;
    a[i] = uniform_real(rng, 0.0, two_pi);
  }
  return LatentState(v, a);
}

PlantedGraph four_cluster_benchmark(std::uint64_t seed) {
  const PlantedClusters planted = planted_clusters(4, 3);
  SynthesisConfig sc;
  sc.n_impulses = 200;
  sc.kind = ImpulseKind::sequential;
  sc.steps = 1;
  sc.seed = seed;
  ModelConfig generator;
  generator.sharpness_k = 8;
  Graph g = synthesize_network(planted.state, sc, generator);
  g.set_ground_truth(planted.truth);
  return {std::move(g), planted.truth};
}

}  // namespace testing
