#include "circlecomm/evaluation.hpp"

#include <stdexcept>
#include <vector>

namespace circlecomm {

namespace {

double choose2(double x) { return 0.5 * x * (x - 1.0); }

struct Contingency {
  double pairs_joint = 0;  // Σ_ij C(n_ij, 2)
  double pairs_a = 0;      // Σ_i C(a_i, 2)
  double pairs_b = 0;      // Σ_j C(b_j, 2)
  double pairs_all = 0;    // C(n, 2)
};

Contingency contingency(const Partition& p1, const Partition& p2) {
  if (p1.size() != p2.size()) throw std::invalid_argument("partitions cover different vertex sets");
  if (p1.size() < 2) throw std::invalid_argument("at least two vertices are required");
  p1.validate();
  p2.validate();
  const auto k1 = static_cast<std::size_t>(p1.k);
  const auto k2 = static_cast<std::size_t>(p2.k);
  std::vector<double> table(k1 * k2, 0.0), a(k1, 0.0), b(k2, 0.0);
  for (std::size_t v = 0; v < p1.size(); ++v) {
    const auto i = static_cast<std::size_t>(p1.assignment[v]);
    const auto j = static_cast<std::size_t>(p2.assignment[v]);
    table[i * k2 + j] += 1;
    a[i] += 1;
    b[j] += 1;
  }
  Contingency c;
  for (double x : table) c.pairs_joint += choose2(x);
  for (double x : a) c.pairs_a += choose2(x);
  for (double x : b) c.pairs_b += choose2(x);
  c.pairs_all = choose2(static_cast<double>(p1.size()));
  return c;
}

}  // namespace

double rand_index(const Partition& p1, const Partition& p2) {
  const auto c = contingency(p1, p2);
  // together in both + apart in both
  const double agree = c.pairs_all + 2.0 * c.pairs_joint - c.pairs_a - c.pairs_b;
  return agree / c.pairs_all;
}

double adjusted_rand_index(const Partition& p1, const Partition& p2) {
  const auto c = contingency(p1, p2);
  // Numerator and denominator scaled by C(n, 2); every term stays an integer
  // (up to the half in the maximum), so small cases come out exact.
  const double expected = c.pairs_a * c.pairs_b;
  const double maximum = 0.5 * (c.pairs_a + c.pairs_b) * c.pairs_all;
  const double denom = maximum - expected;
  if (denom == 0.0) return 0.0;
  return (c.pairs_joint * c.pairs_all - expected) / denom;
}

}  // namespace circlecomm
