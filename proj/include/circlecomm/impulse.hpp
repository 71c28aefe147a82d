#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "circlecomm/graph.hpp"
#include "circlecomm/latent.hpp"
#include "circlecomm/rng.hpp"
#include "circlecomm/trace.hpp"

namespace circlecomm {

/// Sizing of the spreads used to subsample an observed graph.
struct SpreadConfig {
  std::size_t n_impulses = 200;
  /// Stop once this many distinct vertices were reached.
  std::size_t target_size = 8;
  /// Walk-step cap.
  std::size_t max_steps = 400;
  std::uint64_t seed = 0;

  void validate() const;
};

/// max(8, ceil(n / expected_communities)).
std::size_t default_target_size(std::size_t n, std::size_t expected_communities);

/// Snowball random walk over g: starts at a uniformly chosen non-isolated
/// vertex, steps to uniform neighbors, and returns the distinct vertices in
/// first-visit order.
std::vector<Vertex> sample_spread_set(const Graph& g, const SpreadConfig& cfg, Rng& rng);

/// Distribution of the callee when state index `current` places a call:
/// proportional to the clamped link to every other vertex, 0 for itself.
/// Throws DegenerateError when every unclamped weight is exactly 0.
std::vector<double> contact_distribution(const LatentState& state, std::size_t current,
                                         const ModelConfig& cfg);

/// One call from state index `current`; returns the callee's index.
std::size_t sequential_step(const LatentState& state, std::size_t current,
                            const ModelConfig& cfg, Rng& rng);

/// Chain of `steps` calls from a uniform starting vertex. Contacts use the
/// vertex ids of `state`.
ImpulseTrace simulate_sequential_impulse(const LatentState& state, std::size_t steps,
                                         const ModelConfig& cfg, Rng& rng);

/// Broadcast from a uniform center; every other vertex joins independently
/// with probability link(θ_center − θ_j).
ImpulseTrace simulate_instantaneous_impulse(const LatentState& state,
                                            const ModelConfig& cfg, Rng& rng);

struct SynthesisConfig {
  std::size_t n_impulses = 200;
  ImpulseKind kind = ImpulseKind::sequential;
  /// Calls per sequential impulse.
  std::size_t steps = 1;
  BroadcastEdges broadcast = BroadcastEdges::clique;
  AdjacencyMode output_mode = AdjacencyMode::binary;
  std::uint64_t seed = 0;
};

/// Impulse i draws from the sub-stream ("impulse", i) of cfg.seed.
std::vector<ImpulseTrace> simulate_impulses(const LatentState& state,
                                            const SynthesisConfig& cfg,
                                            const ModelConfig& model);

/// Simulates the impulses and assembles the observed graph. `state` must
/// cover vertices 0..n-1 in order.
Graph synthesize_network(const LatentState& state, const SynthesisConfig& cfg,
                         const ModelConfig& model);

/// State with `sizes[c]` vertices at angle `centers[c]` for each cluster c,
/// plus the matching ground truth.
struct PlantedClusters {
  LatentState state;
  std::vector<int> truth;
};
PlantedClusters planted_clusters(const std::vector<double>& centers,
                                 const std::vector<std::size_t>& sizes);
/// `clusters` equally spaced centers starting at 0.
PlantedClusters planted_clusters(std::size_t clusters, std::size_t size);

}  // namespace circlecomm
