#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "json.hpp"

#include "circlecomm/graph.hpp"
#include "circlecomm/sampler.hpp"

namespace circlecomm {

/// Flat assignment of vertices to community ids 0..k-1, every id used.
struct Partition {
  std::vector<int> assignment;
  int k = 0;

  std::size_t size() const noexcept { return assignment.size(); }
  /// Renumbers arbitrary labels by first appearance.
  static Partition from_labels(std::span<const int> labels);
  /// Throws std::invalid_argument if ids are not exactly 0..k-1.
  void validate() const;
  std::vector<std::vector<Vertex>> groups() const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

enum class PairEstimator {
  /// prob_sum / co_count: mean over the spreads containing both vertices.
  conditional_mean,
  /// Σ_i p_i · co_count / N, the unnormalized sum of products.
  literal_sum,
};

/// Same-community evidence accumulated over spread sets.
class PairProbabilityMatrix {
 public:
  explicit PairProbabilityMatrix(std::size_t n = 0);

  std::size_t size() const noexcept { return n_; }
  std::size_t impulses() const noexcept { return impulses_; }
  double prob_sum(Vertex j, Vertex k) const { return sum_[j * n_ + k]; }
  /// Number of spreads containing both j and k; n_impulses on the diagonal.
  std::uint64_t co_count(Vertex j, Vertex k) const {
    return j == k ? impulses_ : count_[j * n_ + k];
  }

  /// Adds one spread: `sigma` are root vertex ids, `pairs` the chain's m×m
  /// pair probabilities in sigma order.
  void accumulate(std::span<const Vertex> sigma, std::span<const double> pairs);
  /// Adds one spread from its chain (posterior means unless `mode` says
  /// otherwise). The chain must cover exactly `sigma`.
  void accumulate(std::span<const Vertex> sigma, const ChainResult& chain,
                  const ModelConfig& cfg, PairEstimate mode = PairEstimate::posterior_mean);
  /// Entry-wise sum; used to combine partial accumulations.
  void merge(const PairProbabilityMatrix& other);

  struct Estimate {
    double probability;
    bool supported;
  };
  Estimate final_pair_probability(Vertex j, Vertex k,
                                  PairEstimator estimator = PairEstimator::conditional_mean) const;
  /// Fraction of unordered pairs never sampled together.
  double unsupported_fraction() const;

  friend bool operator==(const PairProbabilityMatrix&, const PairProbabilityMatrix&) = default;

 private:
  std::size_t n_;
  std::size_t impulses_ = 0;
  std::vector<double> sum_;
  std::vector<std::uint64_t> count_;
};

/// Binary merge tree, scipy-style: leaves are 0..n-1 and merge i creates
/// node n + i. Merges are listed in non-decreasing height.
struct Dendrogram {
  struct Merge {
    std::size_t left;
    std::size_t right;
    double height;
    std::size_t size;
  };
  std::size_t leaves = 0;
  std::vector<Merge> merges;

  /// Heights non-decreasing and every child merged before its parent.
  bool well_formed() const;
};

/// Average-linkage agglomeration of a symmetric n×n distance matrix. Ties go
/// to the pair with the smallest (min leaf id, max leaf id) cluster labels.
Dendrogram average_linkage(std::size_t n, std::span<const double> distances);

/// Average linkage on 1 − final_pair_probability, unsupported pairs at 1.
Dendrogram build_dendrogram(const PairProbabilityMatrix& ppm,
                            PairEstimator estimator = PairEstimator::conditional_mean);

/// Undoes the k-1 last merges. Ids are numbered by smallest member vertex.
Partition cut_at_k(const Dendrogram& d, std::size_t k);

/// Newman modularity tr(e) − Σ(e²) with edge weights as multiplicities.
double modularity(const Graph& g, const Partition& p);

struct BestPartition {
  Partition partition;
  double modularity;
  /// Q of cut k at index k-1.
  std::vector<double> scan;
  /// Every k reaching the maximum.
  std::vector<std::size_t> ties;
};

/// Cut of the dendrogram with maximum modularity, smallest k on ties.
BestPartition select_best_partition(const Dendrogram& d, const Graph& g);

nlohmann::json to_json(const Partition& p, const Graph* g = nullptr, double modularity = 0.0);
Partition partition_from_json(const nlohmann::json& doc);
/// Partition of g's ground truth; throws if g has none.
Partition ground_truth_partition(const Graph& g);

void write_newick(std::ostream& out, const Dendrogram& d, const Graph& g);
void write_dendrogram_dot(std::ostream& out, const Dendrogram& d, const Graph& g);
/// Long form: j,k,label_j,label_k,co_count,prob_sum,probability,supported.
void write_pair_csv(std::ostream& out, const PairProbabilityMatrix& ppm, const Graph& g,
                    PairEstimator estimator = PairEstimator::conditional_mean);

}  // namespace circlecomm
