#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mad/rng.hpp"

namespace mad {

enum class PolicyKind { uniform, beta_bernoulli_ts, gaussian_ts, ucb1 };

std::string_view to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(std::string_view name);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::beta_bernoulli_ts;
  // Joint posterior draws when no closed form is available (K > 2).
  std::size_t mc_draws = 1000;
  // Use Monte Carlo even when a closed form exists.
  bool force_monte_carlo = false;

  void validate() const;
  bool operator==(const PolicyConfig&) const = default;
};

// A length-K probability simplex.
struct AssignmentDistribution {
  std::vector<double> probs;

  std::size_t size() const noexcept { return probs.size(); }
  double operator[](std::size_t w) const { return probs[w]; }
  bool is_simplex(double tol = 1e-12) const;

  static AssignmentDistribution uniform(std::size_t k);
  static AssignmentDistribution one_hot(std::size_t k, std::size_t arm);
};

// Per-arm sufficient statistics for every supported policy. Priors: Beta(1,1)
// for Beta-Bernoulli TS, N(0,1) with unit observation noise for Gaussian TS.
struct PolicyState {
  PolicyKind kind = PolicyKind::uniform;
  std::vector<std::uint64_t> pulls;
  std::vector<double> beta_a;  // successes + 1
  std::vector<double> beta_b;  // failures + 1
  std::vector<double> sums;    // outcome sums (UCB1 means, Gaussian posterior)
  std::uint64_t t = 0;

  static PolicyState initial(PolicyKind kind, std::size_t k);

  std::size_t n_arms() const noexcept { return pulls.size(); }
  double posterior_mean(std::size_t arm) const;      // Gaussian TS
  double posterior_variance(std::size_t arm) const;  // Gaussian TS
};

// p^A_t(w): the probability the policy assigns each arm given its state. Uses
// `rng` only for Monte Carlo estimates.
AssignmentDistribution policy_probs(const PolicyState& state, const PolicyConfig& config, Rng& rng);

// Throws ParameterError for an out-of-range arm or a non-binary outcome fed
// to Beta-Bernoulli TS.
void policy_update(PolicyState& state, std::size_t arm, double outcome);

// P(theta_1 > theta_0) for independent theta_1 ~ Beta(a1, b1), theta_0 ~
// Beta(a0, b0) with integer-valued shape parameters.
double beta_superiority(double a1, double b1, double a0, double b0);

}  // namespace mad
