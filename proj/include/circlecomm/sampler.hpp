#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "circlecomm/graph.hpp"
#include "circlecomm/latent.hpp"
#include "circlecomm/rng.hpp"

namespace circlecomm {

struct McmcConfig {
  std::size_t iterations = 3000;
  std::size_t burn_in = 1000;
  std::size_t thinning = 5;
  /// Half-width of the uniform local proposal, radians.
  double proposal_step = 1.5;
  /// Probability of attempting one jump move after each sweep.
  double jump_probability = 0.2;
  std::uint64_t seed = 0;
  /// Keep a per-iteration diagnostic trace in the result.
  bool record_trace = false;

  void validate() const;
};

struct ChainTraceRow {
  std::size_t iteration;
  double log_posterior;
  std::size_t local_accepted;
  bool jump_attempted;
  bool jump_accepted;
};

struct ChainResult {
  /// Post-burn-in, thinned states; all over the same vertices.
  std::vector<LatentState> samples;
  double acceptance_ratio = 0.0;
  double jump_acceptance_ratio = 0.0;
  std::size_t jump_attempts = 0;
  std::vector<ChainTraceRow> trace;

  std::span<const Vertex> vertices() const;
};

/// Copy of `state` with angle `index` moved by a uniform draw on
/// [−step, step], wrapped into [0, 2π).
LatentState propose_local(const LatentState& state, std::size_t index, double step, Rng& rng);

/// Candidate weights of the jump move started at vertex i of g:
/// (1{i~j} + 1/n) / (deg(i) + 1) for every j, self included.
std::vector<double> jump_candidate_distribution(const Graph& g, Vertex i);

struct JumpOutcome {
  bool self_drawn = false;
  bool accepted = false;
};

/// Picks a uniform vertex i, a partner j from jump_candidate_distribution,
/// proposes θ_i ← θ_j and accepts with probability min(1, likelihood ratio).
/// Drawing j = i is a no-op counted as accepted.
LatentState jump_move(const LatentState& state, const Graph& sub, const ModelConfig& cfg,
                      Rng& rng, JumpOutcome* outcome = nullptr);

/// Metropolis chain on the restricted posterior of `sub`, initialized i.i.d.
/// uniform on the circle.
ChainResult run_chain(const Graph& sub, const ModelConfig& model, const McmcConfig& mcmc,
                      Rng& rng);

/// Same as run_chain from a given initial state. RNG consumption does not
/// depend on the angles.
ChainResult run_chain_from(const Graph& sub, LatentState initial, const ModelConfig& model,
                           const McmcConfig& mcmc, Rng& rng);

enum class PairEstimate {
  /// Average of link(θ_j − θ_k) over retained samples.
  posterior_mean,
  /// link(θ_j − θ_k) of the last retained sample.
  final_sample,
};

/// Same-community probability of root vertices j and k.
double chain_pair_probability(const ChainResult& result, Vertex j, Vertex k,
                              const ModelConfig& cfg,
                              PairEstimate mode = PairEstimate::posterior_mean);

/// All pairs at once; entry [a * m + b] refers to the chain's vertices a, b.
std::vector<double> chain_pair_matrix(const ChainResult& result, const ModelConfig& cfg,
                                      PairEstimate mode = PairEstimate::posterior_mean);

/// CSV: iteration,log_posterior,local_accepted,jump_attempted,jump_accepted
void write_chain_trace(std::ostream& out, const ChainResult& result);

}  // namespace circlecomm
