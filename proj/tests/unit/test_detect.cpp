#include <algorithm>

#include "doctest.h"

#include "circlecomm/detect.hpp"
#include "circlecomm/evaluation.hpp"
#include "support.hpp"

using namespace circlecomm;

namespace {

DetectConfig small_config(std::uint64_t seed) {
  DetectConfig c;
  c.n_impulses = 40;
  c.mcmc.iterations = 600;
  c.mcmc.burn_in = 200;
  c.seed = seed;
  return c;
}

// Two cliques of five joined by the single edge 4-5.
Graph barbell() {
  Graph g = testing::two_cliques(5);
  g.add_edge(4, 5);
  return g;
}

}  // namespace

TEST_SUITE_BEGIN("detect");

TEST_CASE("target size resolution") {
  DetectConfig c;
  CHECK(c.resolved_target_size(34) == 17);
  CHECK(c.resolved_target_size(10) == 8);
  CHECK(c.resolved_target_size(5) == 5);
  c.target_size = 12;
  CHECK(c.resolved_target_size(34) == 12);
  CHECK(c.spread_config(34).max_steps == 240);
  CHECK(c.spread_config(34).n_impulses == 200);
}

TEST_CASE("identical seeds give identical results") {
  Graph g = barbell();
  DetectResult a = detect_communities(g, small_config(3));
  DetectResult b = detect_communities(g, small_config(3));
  CHECK(a.pairs == b.pairs);
  CHECK(a.spreads == b.spreads);
  CHECK(a.partition == b.partition);
  CHECK(a.modularity == b.modularity);
  DetectResult c = detect_communities(g, small_config(4));
  CHECK_FALSE(c.pairs == a.pairs);
}

TEST_CASE("the thread count does not change the result") {
  Graph g = testing::karate();
  DetectConfig cfg = small_config(9);
  DetectResult one = detect_communities(g, cfg, 1);
  for (unsigned threads : {2u, 3u, 8u}) {
    CAPTURE(threads);
    DetectResult many = detect_communities(g, cfg, threads);
    CHECK(many.pairs == one.pairs);
    CHECK(many.spreads == one.spreads);
    CHECK(many.partition == one.partition);
    CHECK(many.best.scan == one.best.scan);
    CHECK(many.mean_acceptance == one.mean_acceptance);
  }
}

TEST_CASE("result structure") {
  Graph g = barbell();
  DetectConfig cfg = small_config(1);
  DetectResult r = detect_communities(g, cfg);
  CHECK(r.pairs.impulses() == cfg.n_impulses);
  CHECK(r.spreads.size() == cfg.n_impulses);
  for (const auto& s : r.spreads) {
    CHECK(s.size() <= cfg.resolved_target_size(g.size()));
    CHECK_FALSE(s.empty());
  }
  CHECK(r.tree.well_formed());
  CHECK(r.partition == r.best.partition);
  CHECK(r.modularity == doctest::Approx(modularity(g, r.partition)));
  CHECK(r.mean_acceptance > 0);
  CHECK(r.mean_acceptance <= 1);
  CHECK(r.mean_jump_acceptance >= 0);
  CHECK(r.mean_jump_acceptance <= 1);
}

TEST_CASE("the barbell splits at the bridge") {
  Graph g = barbell();
  const Partition truth{{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, 2};
  int found = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    DetectResult r = detect_communities(g, small_config(seed));
    const double inside = r.pairs.final_pair_probability(0, 1).probability;
    const double across = r.pairs.final_pair_probability(0, 9).probability;
    CHECK(inside > across);
    found += r.partition == truth;
  }
  CHECK(found >= 2);
}

TEST_CASE("forced k") {
  Graph g = testing::karate();
  DetectConfig cfg = small_config(2);
  for (std::size_t k : {1u, 2u, 5u}) {
    cfg.forced_k = k;
    DetectResult r = detect_communities(g, cfg);
    CHECK(r.partition.k == static_cast<int>(k));
    CHECK(r.partition == cut_at_k(r.tree, k));
    CHECK(r.modularity == doctest::Approx(modularity(g, r.partition)));
  }
  cfg.forced_k = 0;
  CHECK_THROWS_AS(detect_communities(g, cfg), std::invalid_argument);
  cfg.forced_k = 35;
  CHECK_THROWS_AS(detect_communities(g, cfg), std::invalid_argument);
}

TEST_CASE("errors") {
  CHECK_THROWS(detect_communities(Graph(1, AdjacencyMode::binary), DetectConfig{}));
  DetectConfig cfg = small_config(0);
  cfg.model.likelihood = Likelihood::poisson;
  CHECK_THROWS(detect_communities(barbell(), cfg));
  cfg = small_config(0);
  cfg.n_impulses = 0;
  CHECK_THROWS(detect_communities(barbell(), cfg));
  cfg = small_config(0);
  cfg.mcmc.thinning = 0;
  CHECK_THROWS(detect_communities(barbell(), cfg));
  // a failure inside a worker reaches the caller
  cfg = small_config(0);
  cfg.model.likelihood = Likelihood::poisson;
  CHECK_THROWS(detect_communities(barbell(), cfg, 3));
}

TEST_SUITE_END();
