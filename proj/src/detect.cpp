#include "circlecomm/detect.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "circlecomm/rng.hpp"

namespace circlecomm {

std::size_t DetectConfig::resolved_target_size(std::size_t n) const {
  std::size_t t = target_size ? target_size : default_target_size(n, expected_communities);
  return std::min(t, std::max<std::size_t>(n, 2));
}

SpreadConfig DetectConfig::spread_config(std::size_t n) const {
  const std::size_t t = resolved_target_size(n);
  return SpreadConfig{n_impulses, t, std::max(t, steps_per_target * t), seed};
}

namespace {

struct ImpulseOutput {
  std::vector<Vertex> sigma;
  std::vector<double> pairs;
  double acceptance = 0.0;
  double jump_acceptance = 0.0;
};

ImpulseOutput run_impulse(const Graph& g, const DetectConfig& cfg, const SpreadConfig& spread,
                          std::size_t i) {
  ImpulseOutput out;
  Rng spread_rng = make_rng(cfg.seed, "spread", i);
  out.sigma = sample_spread_set(g, spread, spread_rng);
  Graph sub = induced_subgraph(g, out.sigma);
  Rng chain_rng = make_rng(cfg.seed, "chain", i);
  auto chain = run_chain(sub, cfg.model, cfg.mcmc, chain_rng);
  out.pairs = chain_pair_matrix(chain, cfg.model, cfg.pair_estimate);
  out.acceptance = chain.acceptance_ratio;
  out.jump_acceptance = chain.jump_acceptance_ratio;
  return out;
}

}  // namespace

DetectResult detect_communities(const Graph& g, const DetectConfig& cfg, unsigned threads) {
  if (g.size() < 2) throw std::invalid_argument("detection needs at least two vertices");
  cfg.model.validate();
  cfg.mcmc.validate();
  const auto spread = cfg.spread_config(g.size());
  spread.validate();
  if (cfg.forced_k && (*cfg.forced_k < 1 || *cfg.forced_k > g.size()))
    throw std::invalid_argument("forced k out of range");

  // Root-anchored view: spread ids and pair-matrix ids are g's vertex indices.
  Graph root = g;
  std::vector<Vertex> identity(g.size());
  for (Vertex v = 0; v < g.size(); ++v) identity[v] = v;
  root.set_origin(identity);

  std::vector<ImpulseOutput> outputs(cfg.n_impulses);
  threads = std::max(1u, threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < cfg.n_impulses; ++i) outputs[i] = run_impulse(root, cfg, spread, i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cfg.n_impulses;) {
          try {
            outputs[i] = run_impulse(root, cfg, spread, i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  DetectResult result;
  result.pairs = PairProbabilityMatrix(g.size());
  for (auto& out : outputs) {
    result.pairs.accumulate(out.sigma, out.pairs);
    result.mean_acceptance += out.acceptance;
    result.mean_jump_acceptance += out.jump_acceptance;
    result.spreads.push_back(std::move(out.sigma));
  }
  result.mean_acceptance /= static_cast<double>(cfg.n_impulses);
  result.mean_jump_acceptance /= static_cast<double>(cfg.n_impulses);

  result.tree = build_dendrogram(result.pairs, cfg.estimator);
  result.best = select_best_partition(result.tree, g);
  if (cfg.forced_k) {
    result.partition = cut_at_k(result.tree, *cfg.forced_k);
    result.modularity = modularity(g, result.partition);
  } else {
    result.partition = result.best.partition;
    result.modularity = result.best.modularity;
  }
  return result;
}

}  // namespace circlecomm
