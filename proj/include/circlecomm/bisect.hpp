#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "circlecomm/community.hpp"
#include "circlecomm/graph.hpp"
#include "circlecomm/latent.hpp"
#include "circlecomm/sampler.hpp"

namespace circlecomm {

struct BisectConfig {
  /// Exponent of the sharpened link g = h^k used by every level's chain.
  int sharpness_k = 4;
  /// Groups of at most this many vertices are not split further.
  std::size_t max_group_size = 3;
  /// Walk-step cap of a level's spread, per vertex of the group.
  std::size_t steps_per_vertex = 50;
  Likelihood likelihood = Likelihood::bernoulli;
  double lambda = 1.0;
  McmcConfig mcmc;
  std::uint64_t seed = 0;

  void validate() const;
  ModelConfig model() const;
};

/// Splits the vertices covered by `chain` into two circular arcs of their
/// aligned mean angles, cutting at the two largest gaps. Returns root vertex
/// ids, each side sorted, the side holding the smallest id first. Throws
/// DegenerateError when all mean angles coincide.
std::pair<std::vector<Vertex>, std::vector<Vertex>> split_two(const Graph& sub,
                                                              const ChainResult& chain);

/// Per-vertex circular mean of the retained samples after rotating each
/// sample so vertex 0 sits at angle 0 and reflecting it so vertex 1 lies in
/// [0, π].
std::vector<double> aligned_mean_angles(const ChainResult& chain);

/// Same split rule on given angles; returns positions into `angles`.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_by_largest_gaps(
    std::span<const double> angles, std::span<const Vertex> ids);

struct BisectResult {
  /// Leaf groups merged at height 0, splits above them at heights in (0, 1],
  /// the top split at 1. cut_at_k(tree, leaves.k) == leaves.
  Dendrogram tree;
  Partition leaves;
  /// Local acceptance ratio of every chain run, in recursion order.
  std::vector<double> acceptance;
};

/// Recursive binary splitting: spread within the group, chain with h^k,
/// split_two, recurse on both sides until groups are small or inseparable.
BisectResult recursive_bisect(const Graph& g, const BisectConfig& cfg);

}  // namespace circlecomm
