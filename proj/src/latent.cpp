#include "circlecomm/latent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace circlecomm {

double wrap_angle(double a) {
  double r = std::fmod(a, two_pi);
  if (r < 0) r += two_pi;
  // fmod of a tiny negative value can round up to exactly 2π.
  if (r >= two_pi) r = 0.0;
  return r;
}

double circular_distance(double a, double b) {
  double d = wrap_angle(std::fabs(a - b));
  return std::min(d, two_pi - d);
}

double link_h(double y) { return 0.5 * (std::cos(y) + 1.0); }

double link_g(double y, int k) {
  if (k < 1) throw std::invalid_argument("link_g: k must be >= 1");
  return link_from_cos(std::cos(y), k);
}

LatentState::LatentState(std::vector<Vertex> vertices, std::vector<double> angles)
    : vertices_(std::move(vertices)), angles_(std::move(angles)) {
  if (vertices_.size() != angles_.size())
    throw std::invalid_argument("LatentState: one angle per vertex required");
  auto sorted = vertices_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("LatentState: duplicate vertex");
  for (double& a : angles_) a = wrap_angle(a);
}

void LatentState::set_angle(std::size_t index, double value) {
  angles_.at(index) = wrap_angle(value);
}

std::size_t LatentState::index_of(Vertex v) const {
  auto it = std::find(vertices_.begin(), vertices_.end(), v);
  return static_cast<std::size_t>(it - vertices_.begin());
}

void ModelConfig::validate() const {
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  if (sharpness_k < 1) throw std::invalid_argument("sharpness_k must be >= 1");
}

double link_probability(double a, double b, const ModelConfig& cfg) {
  double p = link_from_cos(std::cos(a - b), cfg.sharpness_k);
  return std::clamp(p, probability_floor, 1.0 - probability_floor);
}

double pair_log_density(std::uint32_t a, double p, const ModelConfig& cfg) {
  if (cfg.likelihood == Likelihood::bernoulli)
    return a ? std::log(p) : std::log1p(-p);
  const double rate = cfg.lambda * p;
  const double x = static_cast<double>(a);
  return x * std::log(rate) - rate - std::lgamma(x + 1.0);
}

void check_compatible(const Graph& sub, const LatentState& state, const ModelConfig& cfg) {
  cfg.validate();
  if (state.size() != sub.size())
    throw std::invalid_argument("latent state and graph cover different vertex counts");
  auto origin = sub.origin();
  auto vertices = state.vertices();
  if (!std::equal(origin.begin(), origin.end(), vertices.begin()))
    throw std::invalid_argument("latent state and graph cover different vertices");
  const bool want_binary = cfg.likelihood == Likelihood::bernoulli;
  if (want_binary != (sub.mode() == AdjacencyMode::binary))
    throw std::invalid_argument(
        "likelihood does not match adjacency mode (bernoulli needs binary, poisson needs count)");
}

double log_likelihood(const Graph& sub, const LatentState& state, const ModelConfig& cfg) {
  check_compatible(sub, state, cfg);
  const auto angles = state.angles();
  double total = 0.0;
  for (std::size_t j = 0; j < sub.size(); ++j)
    for (std::size_t k = j + 1; k < sub.size(); ++k)
      total += pair_log_density(sub.weight(j, k), link_probability(angles[j], angles[k], cfg), cfg);
  return total;
}

double log_prior(std::size_t vertex_count) {
  return -static_cast<double>(vertex_count) * std::log(two_pi);
}

double log_posterior(const Graph& sub, const LatentState& state, const ModelConfig& cfg) {
  return log_likelihood(sub, state, cfg) + log_prior(state.size());
}

double vertex_log_likelihood(const Graph& sub, std::span<const double> angles,
                             std::size_t index, double angle, const ModelConfig& cfg) {
  double total = 0.0;
  for (std::size_t j = 0; j < sub.size(); ++j) {
    if (j == index) continue;
    total += pair_log_density(sub.weight(index, j), link_probability(angle, angles[j], cfg), cfg);
  }
  return total;
}

}  // namespace circlecomm
