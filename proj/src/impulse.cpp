#include "circlecomm/impulse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "circlecomm/error.hpp"

namespace circlecomm {

void SpreadConfig::validate() const {
  if (n_impulses < 1) throw std::invalid_argument("n_impulses must be >= 1");
  if (target_size < 2) throw std::invalid_argument("target_size must be >= 2");
  if (max_steps < target_size) throw std::invalid_argument("max_steps must be >= target_size");
}

std::size_t default_target_size(std::size_t n, std::size_t expected_communities) {
  if (expected_communities == 0) throw std::invalid_argument("expected_communities must be >= 1");
  return std::max<std::size_t>(8, (n + expected_communities - 1) / expected_communities);
}

std::vector<Vertex> sample_spread_set(const Graph& g, const SpreadConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<Vertex> active;
  for (Vertex v = 0; v < g.size(); ++v)
    if (g.degree(v) > 0) active.push_back(v);
  if (active.empty()) throw DegenerateError("no spread possible: graph has no edges");

  std::vector<char> seen(g.size(), 0);
  Vertex current = active[uniform_index(rng, active.size())];
  std::vector<Vertex> reached{current};
  seen[current] = 1;
  for (std::size_t step = 0; step < cfg.max_steps && reached.size() < cfg.target_size; ++step) {
    auto nb = g.neighbors(current);
    current = nb[uniform_index(rng, nb.size())];
    if (!seen[current]) {
      seen[current] = 1;
      reached.push_back(current);
    }
  }
  return reached;
}

std::vector<double> contact_distribution(const LatentState& state, std::size_t current,
                                         const ModelConfig& cfg) {
  const std::size_t n = state.size();
  if (n < 2) throw std::invalid_argument("an impulse needs at least two vertices");
  std::vector<double> w(n, 0.0);
  bool any = false;
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == current) continue;
    double raw = link_from_cos(std::cos(state.angle(current) - state.angle(j)), cfg.sharpness_k);
    any = any || raw > 0.0;
    w[j] = std::clamp(raw, probability_floor, 1.0);
    total += w[j];
  }
  if (!any) throw DegenerateError("degenerate impulse: every contact weight is zero");
  for (double& x : w) x /= total;
  return w;
}

std::size_t sequential_step(const LatentState& state, std::size_t current,
                            const ModelConfig& cfg, Rng& rng) {
  const auto p = contact_distribution(state, current, cfg);
  double u = uniform01(rng);
  std::size_t last = current;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;
    last = j;
    if (u < p[j]) return j;
    u -= p[j];
  }
  return last;  // rounding left a sliver of mass past the end
}

ImpulseTrace simulate_sequential_impulse(const LatentState& state, std::size_t steps,
                                         const ModelConfig& cfg, Rng& rng) {
  if (state.size() < 2) throw std::invalid_argument("an impulse needs at least two vertices");
  if (steps < 1) throw std::invalid_argument("a sequential impulse needs at least one step");
  ImpulseTrace trace;
  trace.kind = ImpulseKind::sequential;
  std::size_t current = uniform_index(rng, state.size());
  for (std::size_t t = 0; t < steps; ++t) {
    std::size_t next = sequential_step(state, current, cfg, rng);
    trace.contacts.emplace_back(state.vertices()[current], state.vertices()[next]);
    current = next;
  }
  return trace;
}

ImpulseTrace simulate_instantaneous_impulse(const LatentState& state,
                                            const ModelConfig& cfg, Rng& rng) {
  if (state.size() < 2) throw std::invalid_argument("an impulse needs at least two vertices");
  ImpulseTrace trace;
  trace.kind = ImpulseKind::instantaneous;
  const std::size_t c = uniform_index(rng, state.size());
  trace.center = state.vertices()[c];
  for (std::size_t j = 0; j < state.size(); ++j) {
    if (j == c) continue;
    double p = link_from_cos(std::cos(state.angle(c) - state.angle(j)), cfg.sharpness_k);
    if (bernoulli(rng, p)) trace.recipients.push_back(state.vertices()[j]);
  }
  return trace;
}

std::vector<ImpulseTrace> simulate_impulses(const LatentState& state,
                                            const SynthesisConfig& cfg,
                                            const ModelConfig& model) {
  model.validate();
  if (cfg.n_impulses < 1) throw std::invalid_argument("at least one impulse is required");
  std::vector<ImpulseTrace> traces;
  traces.reserve(cfg.n_impulses);
  for (std::size_t i = 0; i < cfg.n_impulses; ++i) {
    Rng rng = make_rng(cfg.seed, "impulse", i);
    traces.push_back(cfg.kind == ImpulseKind::sequential
                         ? simulate_sequential_impulse(state, cfg.steps, model, rng)
                         : simulate_instantaneous_impulse(state, model, rng));
  }
  return traces;
}

Graph synthesize_network(const LatentState& state, const SynthesisConfig& cfg,
                         const ModelConfig& model) {
  for (std::size_t i = 0; i < state.size(); ++i)
    if (state.vertices()[i] != i)
      throw std::invalid_argument("synthesize_network: state must cover vertices 0..n-1 in order");
  auto traces = simulate_impulses(state, cfg, model);
  return graph_from_impulses(traces, state.size(), cfg.output_mode, cfg.broadcast);
}

PlantedClusters planted_clusters(const std::vector<double>& centers,
                                 const std::vector<std::size_t>& sizes) {
  if (centers.size() != sizes.size())
    throw std::invalid_argument("one size per cluster center required");
  std::vector<Vertex> vertices;
  std::vector<double> angles;
  std::vector<int> truth;
  for (std::size_t c = 0; c < centers.size(); ++c)
    for (std::size_t k = 0; k < sizes[c]; ++k) {
      vertices.push_back(vertices.size());
      angles.push_back(centers[c]);
      truth.push_back(static_cast<int>(c));
    }
  return {LatentState(std::move(vertices), std::move(angles)), std::move(truth)};
}

PlantedClusters planted_clusters(std::size_t clusters, std::size_t size) {
  std::vector<double> centers(clusters);
  for (std::size_t c = 0; c < clusters; ++c)
    centers[c] = two_pi * static_cast<double>(c) / static_cast<double>(clusters);
  return planted_clusters(centers, std::vector<std::size_t>(clusters, size));
}

}  // namespace circlecomm
