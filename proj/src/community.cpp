#include "circlecomm/community.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "circlecomm/error.hpp"

namespace circlecomm {

// ---------------------------------------------------------------------------
// Partition

Partition Partition::from_labels(std::span<const int> labels) {
  Partition p;
  std::map<int, int> ids;
  p.assignment.reserve(labels.size());
  for (int l : labels) {
    auto [it, _] = ids.try_emplace(l, static_cast<int>(ids.size()));
    p.assignment.push_back(it->second);
  }
  p.k = static_cast<int>(ids.size());
  return p;
}

void Partition::validate() const {
  std::vector<char> used(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (int c : assignment) {
    if (c < 0 || c >= k) throw std::invalid_argument("partition id out of range");
    used[static_cast<std::size_t>(c)] = 1;
  }
  if (std::find(used.begin(), used.end(), 0) != used.end())
    throw std::invalid_argument("partition has an empty community");
}

std::vector<std::vector<Vertex>> Partition::groups() const {
  std::vector<std::vector<Vertex>> out(static_cast<std::size_t>(k));
  for (Vertex v = 0; v < assignment.size(); ++v)
    out[static_cast<std::size_t>(assignment[v])].push_back(v);
  return out;
}

// ---------------------------------------------------------------------------
// Pair probabilities

PairProbabilityMatrix::PairProbabilityMatrix(std::size_t n)
    : n_(n), sum_(n * n, 0.0), count_(n * n, 0) {}

void PairProbabilityMatrix::accumulate(std::span<const Vertex> sigma,
                                       std::span<const double> pairs) {
  const std::size_t m = sigma.size();
  if (pairs.size() != m * m) throw std::invalid_argument("pair matrix does not match sigma");
  for (Vertex v : sigma)
    if (v >= n_) throw std::out_of_range("sigma references a vertex outside the matrix");
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      const std::size_t j = sigma[a], k = sigma[b];
      const double p = pairs[a * m + b];
      sum_[j * n_ + k] += p;
      sum_[k * n_ + j] += p;
      ++count_[j * n_ + k];
      ++count_[k * n_ + j];
    }
  ++impulses_;
}

void PairProbabilityMatrix::accumulate(std::span<const Vertex> sigma, const ChainResult& chain,
                                       const ModelConfig& cfg, PairEstimate mode) {
  auto covered = chain.vertices();
  if (!std::equal(sigma.begin(), sigma.end(), covered.begin(), covered.end()))
    throw std::invalid_argument("chain does not cover the spread set");
  accumulate(sigma, chain_pair_matrix(chain, cfg, mode));
}

void PairProbabilityMatrix::merge(const PairProbabilityMatrix& other) {
  if (other.n_ != n_) throw std::invalid_argument("cannot merge matrices of different size");
  for (std::size_t i = 0; i < sum_.size(); ++i) {
    sum_[i] += other.sum_[i];
    count_[i] += other.count_[i];
  }
  impulses_ += other.impulses_;
}

PairProbabilityMatrix::Estimate PairProbabilityMatrix::final_pair_probability(
    Vertex j, Vertex k, PairEstimator estimator) const {
  if (j == k) return {1.0, true};
  const auto c = count_[j * n_ + k];
  if (c == 0) return {0.0, false};
  const double s = sum_[j * n_ + k];
  if (estimator == PairEstimator::conditional_mean) return {s / static_cast<double>(c), true};
  return {s * static_cast<double>(c) / static_cast<double>(impulses_), true};
}

double PairProbabilityMatrix::unsupported_fraction() const {
  if (n_ < 2) return 0.0;
  std::size_t missing = 0;
  for (std::size_t j = 0; j < n_; ++j)
    for (std::size_t k = j + 1; k < n_; ++k) missing += count_[j * n_ + k] == 0;
  return static_cast<double>(missing) / static_cast<double>(n_ * (n_ - 1) / 2);
}

// ---------------------------------------------------------------------------
// Dendrogram

bool Dendrogram::well_formed() const {
  if (leaves == 0) return merges.empty();
  if (merges.size() != leaves - 1) return false;
  std::vector<char> used(leaves + merges.size(), 0);
  double last = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < merges.size(); ++i) {
    const auto& m = merges[i];
    if (m.left >= leaves + i || m.right >= leaves + i || m.left == m.right) return false;
    if (used[m.left]++ || used[m.right]++) return false;
    if (m.height < last) return false;
    last = m.height;
  }
  return true;
}

Dendrogram average_linkage(std::size_t n, std::span<const double> distances) {
  if (n < 1) throw std::invalid_argument("average_linkage: no leaves");
  if (distances.size() != n * n) throw std::invalid_argument("average_linkage: matrix size");
  std::vector<double> d(distances.begin(), distances.end());
  std::vector<std::size_t> node(n), size(n, 1), label(n);
  std::vector<char> active(n, 1);
  std::iota(node.begin(), node.end(), std::size_t{0});
  std::iota(label.begin(), label.end(), std::size_t{0});

  Dendrogram tree;
  tree.leaves = n;
  double floor = 0.0;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t ba = n, bb = n;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_key{n, n};
    for (std::size_t a = 0; a < n; ++a) {
      if (!active[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!active[b]) continue;
        const double x = d[a * n + b];
        std::pair key{std::min(label[a], label[b]), std::max(label[a], label[b])};
        if (x < best || (x == best && key < best_key)) {
          best = x;
          best_key = key;
          ba = a;
          bb = b;
        }
      }
    }
    // Average linkage has no inversions; this only absorbs rounding.
    floor = std::max(floor, best);
    tree.merges.push_back({node[ba], node[bb], floor, size[ba] + size[bb]});

    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == ba || c == bb) continue;
      const double x = (static_cast<double>(size[ba]) * d[ba * n + c] +
                        static_cast<double>(size[bb]) * d[bb * n + c]) /
                       static_cast<double>(size[ba] + size[bb]);
      d[ba * n + c] = d[c * n + ba] = x;
    }
    active[bb] = 0;
    size[ba] += size[bb];
    label[ba] = std::min(label[ba], label[bb]);
    node[ba] = n + step;
  }
  return tree;
}

Dendrogram build_dendrogram(const PairProbabilityMatrix& ppm, PairEstimator estimator) {
  const std::size_t n = ppm.size();
  if (n < 2) throw std::invalid_argument("build_dendrogram: need at least two vertices");
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      auto e = ppm.final_pair_probability(j, k, estimator);
      const double x = e.supported ? 1.0 - std::clamp(e.probability, 0.0, 1.0) : 1.0;
      dist[j * n + k] = dist[k * n + j] = x;
    }
  return average_linkage(n, dist);
}

Partition cut_at_k(const Dendrogram& d, std::size_t k) {
  const std::size_t n = d.leaves;
  if (k < 1 || k > n) throw std::invalid_argument("cut_at_k: k out of range");
  std::vector<std::size_t> parent(n + d.merges.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n - k; ++i) {
    const auto& m = d.merges[i];
    parent[find(m.left)] = n + i;
    parent[find(m.right)] = n + i;
  }
  std::vector<int> roots(n);
  for (std::size_t v = 0; v < n; ++v) roots[v] = static_cast<int>(find(v));
  return Partition::from_labels(roots);
}

// ---------------------------------------------------------------------------
// Modularity

double modularity(const Graph& g, const Partition& p) {
  if (p.size() != g.size()) throw std::invalid_argument("partition does not cover the graph");
  p.validate();
  const double total = static_cast<double>(g.total_weight());
  if (total == 0) throw DegenerateError("modularity undefined: graph has no edges");
  // Integer edge counts per community; dividing only at the end keeps
  // Q(single community) = 1 - 1 exactly.
  std::vector<double> inside(static_cast<std::size_t>(p.k), 0.0);
  std::vector<double> degree(static_cast<std::size_t>(p.k), 0.0);
  for (Vertex i = 0; i < g.size(); ++i)
    for (Vertex j : g.neighbors(i)) {
      if (j < i) continue;
      const double w = g.weight(i, j);
      const auto a = static_cast<std::size_t>(p.assignment[i]);
      const auto b = static_cast<std::size_t>(p.assignment[j]);
      if (a == b) inside[a] += w;
      degree[a] += w;
      degree[b] += w;
    }
  double q = 0.0;
  for (std::size_t c = 0; c < inside.size(); ++c) {
    const double share = degree[c] / (2.0 * total);
    q += inside[c] / total - share * share;
  }
  return q;
}

BestPartition select_best_partition(const Dendrogram& d, const Graph& g) {
  if (d.leaves != g.size()) throw std::invalid_argument("dendrogram does not match graph");
  BestPartition best{{}, -std::numeric_limits<double>::infinity(), {}, {}};
  for (std::size_t k = 1; k <= d.leaves; ++k) {
    Partition p = cut_at_k(d, k);
    const double q = modularity(g, p);
    best.scan.push_back(q);
    if (q > best.modularity) {
      best.modularity = q;
      best.partition = std::move(p);
    }
  }
  for (std::size_t k = 1; k <= best.scan.size(); ++k)
    if (best.scan[k - 1] == best.modularity) best.ties.push_back(k);
  return best;
}

// ---------------------------------------------------------------------------
// Exports

nlohmann::json to_json(const Partition& p, const Graph* g, double modularity_value) {
  nlohmann::json doc{{"assignment", p.assignment}, {"k", p.k}};
  if (g) {
    std::vector<std::string> labels(g->size());
    for (Vertex v = 0; v < g->size(); ++v) labels[v] = g->label(v);
    doc["labels"] = labels;
    doc["modularity"] = modularity_value;
  }
  return doc;
}

Partition partition_from_json(const nlohmann::json& doc) {
  try {
    Partition p = Partition::from_labels(doc.at("assignment").get<std::vector<int>>());
    if (doc.contains("k") && doc["k"].get<int>() != p.k)
      throw ParseError("partition 'k' disagrees with its assignment");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid partition document: ") + e.what());
  }
}

Partition ground_truth_partition(const Graph& g) {
  if (!g.ground_truth()) throw std::invalid_argument("graph has no ground truth");
  return Partition::from_labels(*g.ground_truth());
}

namespace {

std::string newick_label(const std::string& s) {
  if (s.find_first_of(" ()[]':;,") == std::string::npos && !s.empty()) return s;
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

}  // namespace

void write_newick(std::ostream& out, const Dendrogram& d, const Graph& g) {
  if (d.leaves != g.size()) throw std::invalid_argument("dendrogram does not match graph");
  const std::size_t n = d.leaves;
  auto height = [&](std::size_t node) { return node < n ? 0.0 : d.merges[node - n].height; };
  std::ostringstream os;
  os.precision(12);
  std::function<void(std::size_t, double)> emit = [&](std::size_t node, double parent_height) {
    if (node < n) {
      os << newick_label(g.label(node));
    } else {
      const auto& m = d.merges[node - n];
      os << '(';
      emit(m.left, m.height);
      os << ',';
      emit(m.right, m.height);
      os << ')';
    }
    os << ':' << parent_height - height(node);
  };
  if (n == 1) {
    os << newick_label(g.label(0));
  } else {
    const auto& m = d.merges.back();
    os << '(';
    emit(m.left, m.height);
    os << ',';
    emit(m.right, m.height);
    os << ')';
  }
  out << os.str() << ";\n";
}

void write_dendrogram_dot(std::ostream& out, const Dendrogram& d, const Graph& g) {
  const std::size_t n = d.leaves;
  out << "digraph dendrogram {\n";
  for (Vertex v = 0; v < n; ++v) out << "  n" << v << " [label=\"" << g.label(v) << "\", shape=box];\n";
  for (std::size_t i = 0; i < d.merges.size(); ++i) {
    const auto& m = d.merges[i];
    out << "  n" << n + i << " [label=\"" << m.height << "\"];\n";
    out << "  n" << n + i << " -> n" << m.left << ";\n";
    out << "  n" << n + i << " -> n" << m.right << ";\n";
  }
  out << "}\n";
}

void write_pair_csv(std::ostream& out, const PairProbabilityMatrix& ppm, const Graph& g,
                    PairEstimator estimator) {
  out << "j,k,label_j,label_k,co_count,prob_sum,probability,supported\n";
  out.precision(17);
  for (Vertex j = 0; j < ppm.size(); ++j)
    for (Vertex k = j + 1; k < ppm.size(); ++k) {
      auto e = ppm.final_pair_probability(j, k, estimator);
      out << j << ',' << k << ',' << g.label(j) << ',' << g.label(k) << ','
          << ppm.co_count(j, k) << ',' << ppm.prob_sum(j, k) << ',' << e.probability << ','
          << int(e.supported) << '\n';
    }
}

}  // namespace circlecomm
