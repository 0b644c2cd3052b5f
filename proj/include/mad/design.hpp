#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mad/outcome_models.hpp"
#include "mad/policies.hpp"

namespace mad {

// Deterministic exploration weight delta_t in (0, 1].
struct DeltaSchedule {
  enum class Kind { power, constant, clipped_max, clipped_min };

  Kind kind = Kind::power;
  double a = 0.0;  // exponent for power / clipped kinds
  double c = 1.0;  // constant level or clip level

  static DeltaSchedule power(double a) { return {Kind::power, a, 1.0}; }
  static DeltaSchedule constant(double c) { return {Kind::constant, 0.0, c}; }
  static DeltaSchedule clipped_max(double a, double c) { return {Kind::clipped_max, a, c}; }
  static DeltaSchedule clipped_min(double a, double c) { return {Kind::clipped_min, a, c}; }

  void validate() const;
  bool operator==(const DeltaSchedule&) const = default;
};

std::string_view to_string(DeltaSchedule::Kind kind);
DeltaSchedule::Kind schedule_kind_from_string(std::string_view name);

// delta at 1-based index t (unit index, or batch index in batched mode).
double evaluate_schedule(const DeltaSchedule& schedule, std::uint64_t t);

// delta/K + (1 - delta) * policy_probs, entrywise. delta must lie in (0, 1].
AssignmentDistribution mix(double delta, const AssignmentDistribution& policy_probs, std::size_t k);

// A design is a labelled schedule. No schedule means the standard bandit
// baseline, which assigns straight from p^A.
struct Design {
  std::string label;
  std::optional<DeltaSchedule> schedule;

  bool is_standard_bandit() const { return !schedule.has_value(); }

  static Design bernoulli() { return {"bernoulli", DeltaSchedule::constant(1.0)}; }
  static Design standard_bandit() { return {"standard_bandit", std::nullopt}; }

  bool operator==(const Design&) const = default;
};

// batch_size 1 is the per-unit design.
struct AssignmentMode {
  std::size_t batch_size = 1;

  static AssignmentMode per_unit() { return {1}; }
  static AssignmentMode batched(std::size_t b) { return {b}; }
  bool is_batched() const { return batch_size > 1; }

  bool operator==(const AssignmentMode&) const = default;
};

struct MadStep {
  AssignmentDistribution mixed;       // probabilities actually used to assign
  AssignmentDistribution raw_policy;  // p^A
  double delta = 0.0;
  std::size_t chosen_arm = 0;
  double observed_outcome = 0.0;
};

struct Trajectory {
  std::vector<MadStep> steps;
  std::string design_label;
  std::uint64_t seed = 0;
  std::uint64_t table_id = 0;  // fingerprint of the potential-outcome table
  std::size_t n_arms = 0;
  AssignmentMode mode;

  std::size_t size() const noexcept { return steps.size(); }
  bool operator==(const Trajectory& other) const;
};

std::uint64_t table_fingerprint(const PotentialOutcomeTable& table);

// Runs the design over every unit of the table. In batched mode, delta and p^A
// are recomputed only at batch boundaries and the policy sees a batch's
// outcomes before the next batch's probabilities are formed.
Trajectory run_trajectory(const PotentialOutcomeTable& table, const PolicyConfig& policy,
                          const Design& design, std::uint64_t seed,
                          AssignmentMode mode = AssignmentMode::per_unit());

// Single categorical draw from `probs`.
std::size_t sample_arm(const AssignmentDistribution& probs, Rng& rng);

// Trajectory as CSV: t, arm, outcome, p0..p{K-1}, delta.
std::string trajectory_csv(const Trajectory& trajectory);

}  // namespace mad
