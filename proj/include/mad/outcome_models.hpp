#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mad {

enum class OutcomeKind { bernoulli, normal, student_t, cauchy };

std::string_view to_string(OutcomeKind kind);
OutcomeKind outcome_kind_from_string(std::string_view name);

// Per-arm parameters. For bernoulli `location` holds p_w; for the location
// families it holds mu_w and `scale`/`df` apply.
struct ArmParameters {
  std::vector<double> location;
  double scale = 1.0;
  double df = 1.0;

  bool operator==(const ArmParameters&) const = default;
};

// Units with 1-based index >= start_unit use `parameters` (until the next
// changepoint).
struct Changepoint {
  std::size_t start_unit = 1;
  ArmParameters parameters;

  bool operator==(const Changepoint&) const = default;
};

struct OutcomeModelSpec {
  OutcomeKind kind = OutcomeKind::bernoulli;
  std::size_t n_units = 0;
  ArmParameters base;
  std::vector<Changepoint> changepoints;

  std::size_t n_arms() const { return base.location.size(); }

  // Throws ParameterError naming the field on the first violation.
  void validate() const;

  // Parameters in force for 1-based unit index.
  const ArmParameters& parameters_at(std::size_t unit) const;

  // True for models whose draws are not bounded in distribution.
  bool heavy_tailed() const { return kind == OutcomeKind::cauchy; }

  bool operator==(const OutcomeModelSpec&) const = default;
};

// Dense n_units x K matrix of potential outcomes Y_i(w), row-major.
class PotentialOutcomeTable {
 public:
  PotentialOutcomeTable(std::size_t n_units, std::size_t n_arms);
  PotentialOutcomeTable(std::size_t n_units, std::size_t n_arms, std::vector<double> values);

  std::size_t n_units() const noexcept { return n_units_; }
  std::size_t n_arms() const noexcept { return n_arms_; }

  // 0-based unit index.
  double operator()(std::size_t unit, std::size_t arm) const { return values_[unit * n_arms_ + arm]; }
  double& operator()(std::size_t unit, std::size_t arm) { return values_[unit * n_arms_ + arm]; }

  std::span<const double> row(std::size_t unit) const {
    return {values_.data() + unit * n_arms_, n_arms_};
  }
  std::span<const double> values() const noexcept { return values_; }

  // Set when generated from a heavy-tailed model; entries are finite but
  // unbounded in distribution.
  bool heavy_tailed = false;

  bool operator==(const PotentialOutcomeTable& other) const {
    return n_units_ == other.n_units_ && n_arms_ == other.n_arms_ && values_ == other.values_;
  }

 private:
  std::size_t n_units_;
  std::size_t n_arms_;
  std::vector<double> values_;
};

PotentialOutcomeTable generate_table(const OutcomeModelSpec& spec, std::uint64_t seed);

// Element t-1 holds (1/t) * sum_{i<=t} (Y_i(w) - Y_i(w_prime)).
std::vector<double> true_ate_curve(const PotentialOutcomeTable& table, std::size_t w,
                                   std::size_t w_prime);

}  // namespace mad
