#include "mad/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "mad/error.hpp"

namespace mad {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::uniform: return "uniform";
    case PolicyKind::beta_bernoulli_ts: return "thompson_beta";
    case PolicyKind::gaussian_ts: return "thompson_gaussian";
    case PolicyKind::ucb1: return "ucb1";
  }
  return "unknown";
}

PolicyKind policy_kind_from_string(std::string_view name) {
  if (name == "uniform" || name == "bernoulli") return PolicyKind::uniform;
  if (name == "thompson_beta" || name == "ts") return PolicyKind::beta_bernoulli_ts;
  if (name == "thompson_gaussian") return PolicyKind::gaussian_ts;
  if (name == "ucb1" || name == "ucb") return PolicyKind::ucb1;
  throw ParameterError("kind", "unknown policy '" + std::string(name) + "'");
}

void PolicyConfig::validate() const {
  if (mc_draws == 0) throw ParameterError("mc_draws", "must be positive");
}

bool AssignmentDistribution::is_simplex(double tol) const {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || p > 1.0 + tol) return false;
    total += p;
  }
  return std::abs(total - 1.0) <= tol;
}

AssignmentDistribution AssignmentDistribution::uniform(std::size_t k) {
  return {std::vector<double>(k, 1.0 / static_cast<double>(k))};
}

AssignmentDistribution AssignmentDistribution::one_hot(std::size_t k, std::size_t arm) {
  AssignmentDistribution d{std::vector<double>(k, 0.0)};
  d.probs[arm] = 1.0;
  return d;
}

PolicyState PolicyState::initial(PolicyKind kind, std::size_t k) {
  if (k < 2) throw ParameterError("n_arms", "at least two arms are required");
  PolicyState s;
  s.kind = kind;
  s.pulls.assign(k, 0);
  s.beta_a.assign(k, 1.0);
  s.beta_b.assign(k, 1.0);
  s.sums.assign(k, 0.0);
  return s;
}

double PolicyState::posterior_mean(std::size_t arm) const {
  return sums[arm] / (1.0 + static_cast<double>(pulls[arm]));
}

double PolicyState::posterior_variance(std::size_t arm) const {
  return 1.0 / (1.0 + static_cast<double>(pulls[arm]));
}

namespace {

// Sum over i in [0, a1) of B(a0+i, b0+b1) / ((b1+i) B(1+i, b1) B(a0, b0)).
// Consecutive terms differ by (a0+i)(b1+i) / ((a0+b0+b1+i)(1+i)), so the sum is
// accumulated with a ratio recurrence in a rescaled linear domain.
double beta_superiority_sum(double a1, double b1, double a0, double b0) {
  const auto terms = static_cast<std::int64_t>(std::llround(a1));
  const double log_first = std::lgamma(b0 + b1) + std::lgamma(a0 + b0) - std::lgamma(a0 + b0 + b1) -
                           std::lgamma(b0);
  double term = 1.0;
  double sum = 0.0;
  double log_scale = 0.0;
  constexpr double kRescale = 1e200;
  for (std::int64_t n = 0; n < terms; ++n) {
    const double i = static_cast<double>(n);
    sum += term;
    term *= (a0 + i) * (b1 + i) / ((a0 + b0 + b1 + i) * (1.0 + i));
    if (term > kRescale || sum > kRescale) {
      term /= kRescale;
      sum /= kRescale;
      log_scale += std::log(kRescale);
    }
  }
  return std::exp(log_first + log_scale + std::log(sum));
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

AssignmentDistribution argmax_frequencies(const PolicyState& state, const PolicyConfig& config,
                                          Rng& rng) {
  const std::size_t k = state.n_arms();
  std::vector<double> counts(k, 0.0);
  std::vector<double> draws(k);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t d = 0; d < config.mc_draws; ++d) {
    for (std::size_t w = 0; w < k; ++w) {
      if (state.kind == PolicyKind::beta_bernoulli_ts) {
        std::gamma_distribution<double> ga(state.beta_a[w], 1.0);
        std::gamma_distribution<double> gb(state.beta_b[w], 1.0);
        const double x = ga(rng);
        const double y = gb(rng);
        draws[w] = x / (x + y);
      } else {
        draws[w] = state.posterior_mean(w) + std::sqrt(state.posterior_variance(w)) * normal(rng);
      }
    }
    counts[static_cast<std::size_t>(std::max_element(draws.begin(), draws.end()) - draws.begin())] += 1.0;
  }
  AssignmentDistribution out{std::move(counts)};
  for (double& p : out.probs) p /= static_cast<double>(config.mc_draws);
  return out;
}

AssignmentDistribution ucb1_probs(const PolicyState& state) {
  const std::size_t k = state.n_arms();
  for (std::size_t w = 0; w < k; ++w) {
    if (state.pulls[w] == 0) return AssignmentDistribution::one_hot(k, w);
  }
  const double log_t = std::log(static_cast<double>(state.t));
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < k; ++w) {
    const double n = static_cast<double>(state.pulls[w]);
    const double index = state.sums[w] / n + std::sqrt(2.0 * log_t / n);
    if (index > best_index) {
      best_index = index;
      best = w;
    }
  }
  return AssignmentDistribution::one_hot(k, best);
}

}  // namespace

double beta_superiority(double a1, double b1, double a0, double b0) {
  // P(theta_1 > theta_0) = 1 - P(theta_0 > theta_1), and reflecting theta ->
  // 1 - theta swaps the shape parameters; iterate over the smallest count.
  const double smallest = std::min({a1, a0, b1, b0});
  if (smallest == a1) return beta_superiority_sum(a1, b1, a0, b0);
  if (smallest == a0) return 1.0 - beta_superiority_sum(a0, b0, a1, b1);
  if (smallest == b0) return beta_superiority_sum(b0, a0, b1, a1);
  return 1.0 - beta_superiority_sum(b1, a1, b0, a0);
}

AssignmentDistribution policy_probs(const PolicyState& state, const PolicyConfig& config, Rng& rng) {
  const std::size_t k = state.n_arms();
  switch (state.kind) {
    case PolicyKind::uniform:
      return AssignmentDistribution::uniform(k);
    case PolicyKind::ucb1:
      return ucb1_probs(state);
    case PolicyKind::beta_bernoulli_ts:
      if (k == 2 && !config.force_monte_carlo) {
        const double p1 = std::clamp(
            beta_superiority(state.beta_a[1], state.beta_b[1], state.beta_a[0], state.beta_b[0]), 0.0, 1.0);
        return {{1.0 - p1, p1}};
      }
      return argmax_frequencies(state, config, rng);
    case PolicyKind::gaussian_ts:
      if (k == 2 && !config.force_monte_carlo) {
        const double z = (state.posterior_mean(1) - state.posterior_mean(0)) /
                         std::sqrt(state.posterior_variance(1) + state.posterior_variance(0));
        const double p1 = standard_normal_cdf(z);
        return {{1.0 - p1, p1}};
      }
      return argmax_frequencies(state, config, rng);
  }
  throw ParameterError("kind", "unsupported policy");
}

void policy_update(PolicyState& state, std::size_t arm, double outcome) {
  if (arm >= state.n_arms()) throw ParameterError("arm", "arm index out of range");
  if (state.kind == PolicyKind::beta_bernoulli_ts) {
    if (outcome == 1.0) {
      state.beta_a[arm] += 1.0;
    } else if (outcome == 0.0) {
      state.beta_b[arm] += 1.0;
    } else {
      throw ParameterError("outcome", "Beta-Bernoulli Thompson sampling requires outcomes in {0, 1}");
    }
  }
  state.pulls[arm] += 1;
  state.sums[arm] += outcome;
  state.t += 1;
}

}  // namespace mad
