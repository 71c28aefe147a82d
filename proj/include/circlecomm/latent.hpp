#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "circlecomm/graph.hpp"

namespace circlecomm {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Lower/upper clamp applied to every link probability before taking logs.
inline constexpr double probability_floor = 1e-12;

/// Reduces an angle into [0, 2π).
double wrap_angle(double a);

/// Length of the shorter arc between a and b, in [0, π].
double circular_distance(double a, double b);

/// h(y) = (cos y + 1) / 2.
double link_h(double y);

/// g(y) = h(y)^k, the sharpened link.
double link_g(double y, int k);

/// h^k evaluated from a precomputed cos(y); used by the hot loops.
inline double link_from_cos(double cos_y, int k) {
  double h = 0.5 * (cos_y + 1.0);
  double p = h;
  for (int i = 1; i < k; ++i) p *= h;
  return p;
}

/// Angles of an ordered vertex subset. Vertices are ids in the root graph.
class LatentState {
 public:
  LatentState() = default;
  LatentState(std::vector<Vertex> vertices, std::vector<double> angles);

  std::size_t size() const noexcept { return vertices_.size(); }
  std::span<const Vertex> vertices() const noexcept { return vertices_; }
  std::span<const double> angles() const noexcept { return angles_; }
  double angle(std::size_t index) const { return angles_[index]; }
  /// Stores wrap_angle(value).
  void set_angle(std::size_t index, double value);

  /// Position of root vertex v in this state, or size() when absent.
  std::size_t index_of(Vertex v) const;

  friend bool operator==(const LatentState&, const LatentState&) = default;

 private:
  std::vector<Vertex> vertices_;
  std::vector<double> angles_;
};

enum class Likelihood { bernoulli, poisson };

struct ModelConfig {
  Likelihood likelihood = Likelihood::bernoulli;
  /// Poisson rate scale; ignored for Bernoulli.
  double lambda = 1.0;
  /// Exponent of the link, 1 for plain h.
  int sharpness_k = 1;

  /// Throws std::invalid_argument on lambda <= 0 or sharpness_k < 1.
  void validate() const;
};

/// Clamped link probability between the angles a and b.
double link_probability(double a, double b, const ModelConfig& cfg);

/// log f(A | p) for one unordered pair, p already clamped.
double pair_log_density(std::uint32_t a, double p, const ModelConfig& cfg);

/// Sum over unordered pairs of log f(A_jk | link(θ_j − θ_k)).
///
/// `state` must list exactly the vertices of `sub` (as given by
/// sub.origin()), in the same order, and sub's adjacency mode must match the
/// likelihood: binary for Bernoulli, count for Poisson.
double log_likelihood(const Graph& sub, const LatentState& state, const ModelConfig& cfg);

/// log_likelihood plus the uniform prior, −|σ| log 2π.
double log_posterior(const Graph& sub, const LatentState& state, const ModelConfig& cfg);

double log_prior(std::size_t vertex_count);

/// Throws if state and sub are not compatible for likelihood evaluation.
void check_compatible(const Graph& sub, const LatentState& state, const ModelConfig& cfg);

/// Contribution of all pairs touching vertex `index` when it sits at
/// `angle` (the other angles taken from `angles`). The difference of two such
/// values is the log-likelihood change of moving that single vertex.
double vertex_log_likelihood(const Graph& sub, std::span<const double> angles,
                             std::size_t index, double angle, const ModelConfig& cfg);

}  // namespace circlecomm
