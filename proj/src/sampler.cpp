#include "circlecomm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>

namespace circlecomm {

void McmcConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (burn_in >= iterations) throw std::invalid_argument("burn_in must be < iterations");
  if (thinning < 1) throw std::invalid_argument("thinning must be >= 1");
  if (!(proposal_step > 0)) throw std::invalid_argument("proposal_step must be positive");
  if (!(jump_probability >= 0 && jump_probability <= 1))
    throw std::invalid_argument("jump_probability must lie in [0, 1]");
}

std::span<const Vertex> ChainResult::vertices() const {
  if (samples.empty()) return {};
  return samples.front().vertices();
}

LatentState propose_local(const LatentState& state, std::size_t index, double step, Rng& rng) {
  if (index >= state.size()) throw std::out_of_range("propose_local: index out of range");
  LatentState next = state;
  next.set_angle(index, state.angle(index) + uniform_real(rng, -step, step));
  return next;
}

std::vector<double> jump_candidate_distribution(const Graph& g, Vertex i) {
  if (i >= g.size()) throw std::out_of_range("jump_candidate_distribution: unknown vertex");
  const double n = static_cast<double>(g.size());
  const double norm = static_cast<double>(g.degree(i)) + 1.0;
  std::vector<double> p(g.size());
  for (Vertex j = 0; j < g.size(); ++j)
    p[j] = ((g.linked(i, j) ? 1.0 : 0.0) + 1.0 / n) / norm;
  return p;
}

namespace {

std::size_t draw_from(std::span<const double> p, Rng& rng) {
  double u = uniform01(rng);
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (u < p[j]) return j;
    u -= p[j];
  }
  return p.size() - 1;
}

// Mutable chain position. Caches cos/sin of every angle and the current
// log-density of every pair, so moving one vertex costs one trig evaluation
// and m - 1 fresh log-densities.
class ChainState {
 public:
  ChainState(const Graph& sub, const LatentState& init, const ModelConfig& cfg)
      : sub_(sub), cfg_(cfg), m_(init.size()), angles_(init.angles().begin(), init.angles().end()),
        cos_(m_), sin_(m_), terms_(m_ * m_, 0.0), scratch_(m_, 0.0) {
    for (std::size_t i = 0; i < m_; ++i) {
      cos_[i] = std::cos(angles_[i]);
      sin_[i] = std::sin(angles_[i]);
    }
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = i + 1; j < m_; ++j)
        terms_[i * m_ + j] = terms_[j * m_ + i] = term(i, j, cos_[i], sin_[i]);
  }

  std::size_t size() const { return m_; }
  double angle(std::size_t i) const { return angles_[i]; }

  // Metropolis step moving vertex i to `proposal`; `u` is the acceptance draw.
  // Returns the log-likelihood change when accepted, nullopt otherwise.
  std::optional<double> try_move(std::size_t i, double proposal, double u) {
    proposal = wrap_angle(proposal);
    const double c = std::cos(proposal);
    const double s = std::sin(proposal);
    double delta = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      if (j == i) continue;
      scratch_[j] = term(i, j, c, s);
      delta += scratch_[j] - terms_[i * m_ + j];
    }
    if (delta >= 0.0 || std::log(u) < delta) {
      angles_[i] = proposal;
      cos_[i] = c;
      sin_[i] = s;
      for (std::size_t j = 0; j < m_; ++j)
        if (j != i) terms_[i * m_ + j] = terms_[j * m_ + i] = scratch_[j];
      return delta;
    }
    return std::nullopt;
  }

  LatentState snapshot(std::span<const Vertex> vertices) const {
    return LatentState({vertices.begin(), vertices.end()}, angles_);
  }

 private:
  // log f(A_ij | link) with θ_i given by its cos/sin.
  double term(std::size_t i, std::size_t j, double c, double s) const {
    double p = link_from_cos(c * cos_[j] + s * sin_[j], cfg_.sharpness_k);
    p = std::clamp(p, probability_floor, 1.0 - probability_floor);
    return pair_log_density(sub_.weight(i, j), p, cfg_);
  }

  const Graph& sub_;
  const ModelConfig& cfg_;
  std::size_t m_;
  std::vector<double> angles_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  std::vector<double> terms_;
  std::vector<double> scratch_;
};

// Shared by jump_move and run_chain; draws i, j, then the acceptance uniform.
JumpOutcome jump_in_place(ChainState& chain, const Graph& sub, Rng& rng, double* delta) {
  JumpOutcome out;
  const std::size_t i = uniform_index(rng, chain.size());
  const auto p = jump_candidate_distribution(sub, i);
  const std::size_t j = draw_from(p, rng);
  if (j == i) {
    out.self_drawn = true;
    out.accepted = true;
    return out;
  }
  const double u = uniform01(rng);
  if (auto d = chain.try_move(i, chain.angle(j), u)) {
    out.accepted = true;
    if (delta) *delta = *d;
  }
  return out;
}

}  // namespace

LatentState jump_move(const LatentState& state, const Graph& sub, const ModelConfig& cfg,
                      Rng& rng, JumpOutcome* outcome) {
  check_compatible(sub, state, cfg);
  ChainState chain(sub, state, cfg);
  JumpOutcome out = jump_in_place(chain, sub, rng, nullptr);
  if (outcome) *outcome = out;
  return out.accepted && !out.self_drawn ? chain.snapshot(state.vertices()) : state;
}

ChainResult run_chain(const Graph& sub, const ModelConfig& model, const McmcConfig& mcmc,
                      Rng& rng) {
  if (sub.size() == 0) throw std::invalid_argument("run_chain: empty graph");
  std::vector<double> init(sub.size());
  for (double& a : init) a = uniform_real(rng, 0.0, two_pi);
  auto origin = sub.origin();
  return run_chain_from(sub, LatentState({origin.begin(), origin.end()}, std::move(init)), model,
                        mcmc, rng);
}

ChainResult run_chain_from(const Graph& sub, LatentState initial, const ModelConfig& model,
                           const McmcConfig& mcmc, Rng& rng) {
  mcmc.validate();
  check_compatible(sub, initial, model);
  const std::size_t m = sub.size();
  ChainState chain(sub, initial, model);
  double loglik = mcmc.record_trace ? log_likelihood(sub, initial, model) : 0.0;
  const double prior = log_prior(m);

  ChainResult result;
  result.samples.reserve((mcmc.iterations - mcmc.burn_in + mcmc.thinning - 1) / mcmc.thinning);
  std::vector<std::size_t> order(m);
  std::size_t local_accepted = 0;
  std::size_t jump_accepted = 0;

  for (std::size_t it = 0; it < mcmc.iterations; ++it) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t a = m; a > 1; --a) std::swap(order[a - 1], order[uniform_index(rng, a)]);

    std::size_t sweep_accepted = 0;
    for (std::size_t i : order) {
      const double proposal = chain.angle(i) + uniform_real(rng, -mcmc.proposal_step, mcmc.proposal_step);
      const double u = uniform01(rng);
      if (auto d = chain.try_move(i, proposal, u)) {
        ++sweep_accepted;
        loglik += *d;
      }
    }
    local_accepted += sweep_accepted;

    bool jump_attempted = false;
    bool jumped = false;
    if (m > 1 && bernoulli(rng, mcmc.jump_probability)) {
      jump_attempted = true;
      double d = 0.0;
      jumped = jump_in_place(chain, sub, rng, &d).accepted;
      ++result.jump_attempts;
      jump_accepted += jumped;
      loglik += d;
    }

    if (mcmc.record_trace)
      result.trace.push_back({it, loglik + prior, sweep_accepted, jump_attempted, jumped});
    if (it >= mcmc.burn_in && (it - mcmc.burn_in) % mcmc.thinning == 0)
      result.samples.push_back(chain.snapshot(initial.vertices()));
  }

  result.acceptance_ratio =
      static_cast<double>(local_accepted) / static_cast<double>(mcmc.iterations * m);
  result.jump_acceptance_ratio =
      result.jump_attempts ? static_cast<double>(jump_accepted) / static_cast<double>(result.jump_attempts)
                           : 0.0;
  return result;
}

double chain_pair_probability(const ChainResult& result, Vertex j, Vertex k,
                              const ModelConfig& cfg, PairEstimate mode) {
  if (result.samples.empty()) throw std::invalid_argument("chain has no retained samples");
  const auto& first = result.samples.front();
  const std::size_t a = first.index_of(j);
  const std::size_t b = first.index_of(k);
  if (a == first.size() || b == first.size())
    throw std::invalid_argument("vertex not covered by the chain");
  if (a == b) return 1.0;
  auto link = [&](const LatentState& s) {
    return link_from_cos(std::cos(s.angle(a) - s.angle(b)), cfg.sharpness_k);
  };
  if (mode == PairEstimate::final_sample) return link(result.samples.back());
  double sum = 0.0;
  for (const auto& s : result.samples) sum += link(s);
  return sum / static_cast<double>(result.samples.size());
}

std::vector<double> chain_pair_matrix(const ChainResult& result, const ModelConfig& cfg,
                                      PairEstimate mode) {
  if (result.samples.empty()) throw std::invalid_argument("chain has no retained samples");
  const std::size_t m = result.samples.front().size();
  std::vector<double> out(m * m, 0.0);
  std::size_t first = mode == PairEstimate::final_sample ? result.samples.size() - 1 : 0;
  const double count = static_cast<double>(result.samples.size() - first);
  for (std::size_t s = first; s < result.samples.size(); ++s) {
    const auto angles = result.samples[s].angles();
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b)
        out[a * m + b] += link_from_cos(std::cos(angles[a] - angles[b]), cfg.sharpness_k);
  }
  for (std::size_t a = 0; a < m; ++a) {
    out[a * m + a] = 1.0;
    for (std::size_t b = a + 1; b < m; ++b) {
      out[a * m + b] /= count;
      out[b * m + a] = out[a * m + b];
    }
  }
  return out;
}

void write_chain_trace(std::ostream& out, const ChainResult& result) {
  out << "iteration,log_posterior,local_accepted,jump_attempted,jump_accepted\n";
  out.precision(17);
  for (const auto& r : result.trace)
    out << r.iteration << ',' << r.log_posterior << ',' << r.local_accepted << ','
        << int(r.jump_attempted) << ',' << int(r.jump_accepted) << '\n';
}

}  // namespace circlecomm
