#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "circlecomm/community.hpp"
#include "circlecomm/graph.hpp"
#include "circlecomm/impulse.hpp"
#include "circlecomm/latent.hpp"
#include "circlecomm/sampler.hpp"

namespace circlecomm {

/// Parameters of the spread / chain / aggregate pipeline.
struct DetectConfig {
  std::size_t n_impulses = 200;
  /// Spread size; 0 selects default_target_size(n, expected_communities).
  std::size_t target_size = 0;
  std::size_t expected_communities = 2;
  /// Walk-step cap per spread, as a multiple of the target size.
  std::size_t steps_per_target = 20;
  ModelConfig model;
  McmcConfig mcmc;
  PairEstimate pair_estimate = PairEstimate::posterior_mean;
  PairEstimator estimator = PairEstimator::conditional_mean;
  /// Cut the dendrogram at this many communities instead of maximizing Q.
  std::optional<std::size_t> forced_k;
  std::uint64_t seed = 0;

  std::size_t resolved_target_size(std::size_t n) const;
  SpreadConfig spread_config(std::size_t n) const;
};

struct DetectResult {
  PairProbabilityMatrix pairs;
  Dendrogram tree;
  BestPartition best;
  /// best.partition, or the forced cut.
  Partition partition;
  double modularity = 0.0;
  std::vector<std::vector<Vertex>> spreads;
  double mean_acceptance = 0.0;
  double mean_jump_acceptance = 0.0;
};

/// Runs one spread + chain per impulse, aggregates the pair probabilities in
/// impulse order and selects a partition. Impulse i uses the sub-streams
/// ("spread", i) and ("chain", i) of cfg.seed, so the result does not depend
/// on `threads`.
DetectResult detect_communities(const Graph& g, const DetectConfig& cfg, unsigned threads = 1);

}  // namespace circlecomm
