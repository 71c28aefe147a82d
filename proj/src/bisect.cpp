#include "circlecomm/bisect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "circlecomm/error.hpp"
#include "circlecomm/impulse.hpp"
#include "circlecomm/rng.hpp"

namespace circlecomm {

void BisectConfig::validate() const {
  if (sharpness_k < 1) throw std::invalid_argument("sharpness_k must be >= 1");
  if (max_group_size < 2) throw std::invalid_argument("max_group_size must be >= 2");
  if (steps_per_vertex < 1) throw std::invalid_argument("steps_per_vertex must be >= 1");
  model().validate();
  mcmc.validate();
}

ModelConfig BisectConfig::model() const {
  return ModelConfig{likelihood, lambda, sharpness_k};
}

std::vector<double> aligned_mean_angles(const ChainResult& chain) {
  if (chain.samples.empty()) throw std::invalid_argument("chain has no retained samples");
  const std::size_t m = chain.samples.front().size();
  std::vector<double> sx(m, 0.0), sy(m, 0.0), aligned(m);
  for (const auto& s : chain.samples) {
    const double origin = s.angle(0);
    for (std::size_t v = 0; v < m; ++v) aligned[v] = wrap_angle(s.angle(v) - origin);
    if (m > 1 && aligned[1] > std::numbers::pi)
      for (double& a : aligned) a = wrap_angle(-a);
    for (std::size_t v = 0; v < m; ++v) {
      sx[v] += std::cos(aligned[v]);
      sy[v] += std::sin(aligned[v]);
    }
  }
  std::vector<double> mean(m);
  for (std::size_t v = 0; v < m; ++v) mean[v] = wrap_angle(std::atan2(sy[v], sx[v]));
  return mean;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_by_largest_gaps(
    std::span<const double> angles, std::span<const Vertex> ids) {
  const std::size_t m = angles.size();
  if (m < 2) throw std::invalid_argument("split needs at least two vertices");
  if (ids.size() != m) throw std::invalid_argument("one id per angle required");

  bool separated = false;
  for (std::size_t a = 0; a < m && !separated; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      if (circular_distance(angles[a], angles[b]) > 1e-9) {
        separated = true;
        break;
      }
  if (!separated) throw DegenerateError("no separation: all mean angles coincide");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return angles[a] != angles[b] ? angles[a] < angles[b] : ids[a] < ids[b];
  });
  // gap g sits between order[g] and order[g + 1 mod m]
  std::vector<double> gap(m);
  for (std::size_t g = 0; g + 1 < m; ++g) gap[g] = angles[order[g + 1]] - angles[order[g]];
  gap[m - 1] = angles[order[0]] + two_pi - angles[order[m - 1]];

  std::vector<std::size_t> rank(m);
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
    if (gap[a] != gap[b]) return gap[a] > gap[b];
    return ids[order[(a + 1) % m]] < ids[order[(b + 1) % m]];
  });
  const std::size_t lo = std::min(rank[0], rank[1]);
  const std::size_t hi = std::max(rank[0], rank[1]);

  std::vector<std::size_t> arc, rest;
  for (std::size_t p = 0; p < m; ++p) (p > lo && p <= hi ? arc : rest).push_back(order[p]);
  auto by_id = [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; };
  std::sort(arc.begin(), arc.end(), by_id);
  std::sort(rest.begin(), rest.end(), by_id);
  if (ids[rest.front()] < ids[arc.front()]) std::swap(arc, rest);
  return {arc, rest};
}

std::pair<std::vector<Vertex>, std::vector<Vertex>> split_two(const Graph& sub,
                                                              const ChainResult& chain) {
  const auto vertices = chain.vertices();
  auto origin = sub.origin();
  if (!std::equal(origin.begin(), origin.end(), vertices.begin(), vertices.end()))
    throw std::invalid_argument("chain does not cover the graph");
  if (sub.size() < 2) throw std::invalid_argument("split needs at least two vertices");
  const auto means = aligned_mean_angles(chain);
  auto [a, b] = split_by_largest_gaps(means, vertices);
  std::vector<Vertex> left, right;
  for (auto p : a) left.push_back(vertices[p]);
  for (auto p : b) right.push_back(vertices[p]);
  return {left, right};
}

namespace {

struct Node {
  std::vector<Vertex> members;  // root ids, sorted
  std::size_t depth = 0;
  int left = -1;
  int right = -1;
};

class Bisector {
 public:
  Bisector(const Graph& g, const BisectConfig& cfg) : g_(g), cfg_(cfg), model_(cfg.model()) {}

  std::vector<Node> nodes;
  std::vector<double> acceptance;

  void grow(std::vector<Vertex> members, std::size_t depth, std::uint64_t seed) {
    const int id = static_cast<int>(nodes.size());
    nodes.push_back({std::move(members), depth});
    auto halves = split(nodes[static_cast<std::size_t>(id)].members, seed);
    if (!halves) return;
    nodes[static_cast<std::size_t>(id)].left = static_cast<int>(nodes.size());
    grow(std::move(halves->first), depth + 1, derive_seed(seed, "left"));
    nodes[static_cast<std::size_t>(id)].right = static_cast<int>(nodes.size());
    grow(std::move(halves->second), depth + 1, derive_seed(seed, "right"));
  }

 private:
  // Returns nullopt when the group is a leaf.
  std::optional<std::pair<std::vector<Vertex>, std::vector<Vertex>>> split(
      const std::vector<Vertex>& members, std::uint64_t seed) {
    if (members.size() <= cfg_.max_group_size) return std::nullopt;
    // members are root ids and g_ is the root graph, so positions == ids here
    Graph sub = induced_subgraph(g_, members);
    if (sub.edge_count() == 0) return std::nullopt;

    SpreadConfig spread{1, members.size(), std::max(members.size(), cfg_.steps_per_vertex * members.size()), seed};
    Rng spread_rng = make_rng(seed, "spread");
    auto sigma_local = sample_spread_set(sub, spread, spread_rng);

    if (sigma_local.size() < members.size()) {
      // The walk could not reach everything (disconnected group or step cap):
      // the reached part and the remainder become the two sides.
      std::vector<Vertex> reached, rest;
      std::vector<char> in(members.size(), 0);
      for (Vertex v : sigma_local) in[v] = 1;
      for (std::size_t p = 0; p < members.size(); ++p)
        (in[p] ? reached : rest).push_back(members[p]);
      if (reached.front() > rest.front()) std::swap(reached, rest);
      return std::pair{reached, rest};
    }

    Graph spread_sub = induced_subgraph(sub, sigma_local);
    Rng chain_rng = make_rng(seed, "chain");
    auto chain = run_chain(spread_sub, model_, cfg_.mcmc, chain_rng);
    acceptance.push_back(chain.acceptance_ratio);
    try {
      return split_two(spread_sub, chain);
    } catch (const DegenerateError&) {
      return std::nullopt;
    }
  }

  const Graph& g_;
  const BisectConfig& cfg_;
  ModelConfig model_;
};

}  // namespace

BisectResult recursive_bisect(const Graph& g, const BisectConfig& cfg) {
  cfg.validate();
  if (g.size() == 0) throw std::invalid_argument("recursive_bisect: empty graph");
  const bool want_binary = cfg.likelihood == Likelihood::bernoulli;
  if (want_binary != (g.mode() == AdjacencyMode::binary))
    throw std::invalid_argument("likelihood does not match adjacency mode");

  // Work on a root-anchored copy so induced subgraphs report root ids.
  Graph root = g;
  std::vector<Vertex> identity(g.size());
  std::iota(identity.begin(), identity.end(), Vertex{0});
  root.set_origin(identity);

  Bisector b(root, cfg);
  b.grow(identity, 0, derive_seed(cfg.seed, "bisect"));
  const auto& nodes = b.nodes;

  std::size_t max_depth = 0;
  for (const auto& nd : nodes)
    if (nd.left >= 0) max_depth = std::max(max_depth, nd.depth);

  BisectResult result;
  result.acceptance = b.acceptance;
  const std::size_t n = g.size();
  result.tree.leaves = n;

  std::vector<std::size_t> handle(nodes.size(), 0);  // dendrogram node of each tree node
  std::vector<std::size_t> leaf_ids;
  std::vector<std::size_t> splits;
  for (std::size_t i = 0; i < nodes.size(); ++i) (nodes[i].left < 0 ? leaf_ids : splits).push_back(i);
  auto min_member = [&](std::size_t i) { return nodes[i].members.front(); };
  std::sort(leaf_ids.begin(), leaf_ids.end(),
            [&](std::size_t a, std::size_t b) { return min_member(a) < min_member(b); });

  std::vector<int> labels(n, 0);
  int group = 0;
  for (std::size_t leaf : leaf_ids) {
    const auto& members = nodes[leaf].members;
    std::size_t acc = members.front();
    for (std::size_t p = 1; p < members.size(); ++p) {
      result.tree.merges.push_back({acc, members[p], 0.0, p + 1});
      acc = n + result.tree.merges.size() - 1;
    }
    handle[leaf] = acc;
    for (Vertex v : members) labels[v] = group;
    ++group;
  }

  auto height = [&](std::size_t i) {
    return static_cast<double>(max_depth + 1 - nodes[i].depth) / static_cast<double>(max_depth + 1);
  };
  std::sort(splits.begin(), splits.end(), [&](std::size_t a, std::size_t b) {
    if (nodes[a].depth != nodes[b].depth) return nodes[a].depth > nodes[b].depth;
    return min_member(a) < min_member(b);
  });
  for (std::size_t s : splits) {
    const auto l = static_cast<std::size_t>(nodes[s].left);
    const auto r = static_cast<std::size_t>(nodes[s].right);
    result.tree.merges.push_back({handle[l], handle[r], height(s), nodes[s].members.size()});
    handle[s] = n + result.tree.merges.size() - 1;
  }
  result.leaves = Partition::from_labels(labels);
  return result;
}

}  // namespace circlecomm
