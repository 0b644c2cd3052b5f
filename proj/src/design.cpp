#include "mad/design.hpp"

#include <cmath>
#include <algorithm>
#include <sstream>

#include "mad/error.hpp"

namespace mad {

std::string_view to_string(DeltaSchedule::Kind kind) {
  switch (kind) {
    case DeltaSchedule::Kind::power: return "power";
    case DeltaSchedule::Kind::constant: return "constant";
    case DeltaSchedule::Kind::clipped_max: return "clipped_max";
    case DeltaSchedule::Kind::clipped_min: return "clipped_min";
  }
  return "unknown";
}

DeltaSchedule::Kind schedule_kind_from_string(std::string_view name) {
  if (name == "power") return DeltaSchedule::Kind::power;
  if (name == "constant") return DeltaSchedule::Kind::constant;
  if (name == "clipped_max") return DeltaSchedule::Kind::clipped_max;
  if (name == "clipped_min") return DeltaSchedule::Kind::clipped_min;
  throw ParameterError("kind", "unknown schedule kind '" + std::string(name) + "'");
}

void DeltaSchedule::validate() const {
  const bool uses_a = kind != Kind::constant;
  const bool uses_c = kind != Kind::power;
  if (uses_a && !(a >= 0.0 && std::isfinite(a))) throw ParameterError("a", "exponent must be >= 0");
  if (uses_c && !(c > 0.0 && c <= 1.0)) throw ParameterError("c", "level must lie in (0, 1]");
}

double evaluate_schedule(const DeltaSchedule& schedule, std::uint64_t t) {
  if (t == 0) throw ParameterError("t", "schedules are indexed from 1");
  schedule.validate();
  const double decay = std::pow(static_cast<double>(t), -schedule.a);
  switch (schedule.kind) {
    case DeltaSchedule::Kind::power: return decay;
    case DeltaSchedule::Kind::constant: return schedule.c;
    case DeltaSchedule::Kind::clipped_max: return std::max(decay, schedule.c);
    case DeltaSchedule::Kind::clipped_min: return std::min(decay, schedule.c);
  }
  return 1.0;
}

AssignmentDistribution mix(double delta, const AssignmentDistribution& policy_probs, std::size_t k) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ParameterError("delta", "must lie in (0, 1]");
  if (policy_probs.size() != k) throw ParameterError("policy_probs", "length must equal K");
  const double floor = delta / static_cast<double>(k);
  AssignmentDistribution out{std::vector<double>(k)};
  for (std::size_t w = 0; w < k; ++w) out.probs[w] = floor + (1.0 - delta) * policy_probs[w];
  return out;
}

std::size_t sample_arm(const AssignmentDistribution& probs, Rng& rng) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t w = 0; w < probs.size(); ++w) {
    if (probs[w] <= 0.0) continue;
    last_positive = w;
    cumulative += probs[w];
    if (u < cumulative) return w;
  }
  // Rounding left u above the accumulated mass.
  return last_positive;
}

bool Trajectory::operator==(const Trajectory& other) const {
  if (steps.size() != other.steps.size() || design_label != other.design_label || seed != other.seed ||
      table_id != other.table_id || n_arms != other.n_arms) {
    return false;
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& a = steps[i];
    const auto& b = other.steps[i];
    if (a.mixed.probs != b.mixed.probs || a.raw_policy.probs != b.raw_policy.probs || a.delta != b.delta ||
        a.chosen_arm != b.chosen_arm || a.observed_outcome != b.observed_outcome) {
      return false;
    }
  }
  return true;
}

std::uint64_t table_fingerprint(const PotentialOutcomeTable& table) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_bytes = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t dims[2] = {table.n_units(), table.n_arms()};
  mix_bytes(dims, sizeof(dims));
  mix_bytes(table.values().data(), table.values().size() * sizeof(double));
  return h;
}

Trajectory run_trajectory(const PotentialOutcomeTable& table, const PolicyConfig& policy,
                          const Design& design, std::uint64_t seed, AssignmentMode mode) {
  policy.validate();
  if (design.schedule) design.schedule->validate();
  if (mode.batch_size == 0) throw ParameterError("batch_size", "must be positive");
  const std::size_t k = table.n_arms();

  Trajectory trajectory;
  trajectory.design_label = design.label;
  trajectory.seed = seed;
  trajectory.table_id = table_fingerprint(table);
  trajectory.n_arms = k;
  trajectory.mode = mode;
  trajectory.steps.reserve(table.n_units());

  Rng assign_rng = make_stream(seed, "assignment");
  Rng policy_rng = make_stream(seed, "policy");
  PolicyState state = PolicyState::initial(policy.kind, k);

  const std::size_t n = table.n_units();
  for (std::size_t start = 0, batch = 1; start < n; start += mode.batch_size, ++batch) {
    const std::size_t end = std::min(n, start + mode.batch_size);
    AssignmentDistribution raw = policy_probs(state, policy, policy_rng);
    double delta = 0.0;
    AssignmentDistribution mixed;
    if (design.schedule) {
      delta = evaluate_schedule(*design.schedule, batch);
      mixed = mix(delta, raw, k);
    } else {
      mixed = raw;
    }
    const std::size_t first_new = trajectory.steps.size();
    for (std::size_t i = start; i < end; ++i) {
      const std::size_t arm = sample_arm(mixed, assign_rng);
      trajectory.steps.push_back({mixed, raw, delta, arm, table(i, arm)});
    }
    for (std::size_t s = first_new; s < trajectory.steps.size(); ++s) {
      policy_update(state, trajectory.steps[s].chosen_arm, trajectory.steps[s].observed_outcome);
    }
  }
  return trajectory;
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::ostringstream out;
  out.precision(17);
  out << "t,arm,outcome";
  for (std::size_t w = 0; w < trajectory.n_arms; ++w) out << ",p" << w;
  out << ",delta\n";
  for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
    const auto& s = trajectory.steps[i];
    out << (i + 1) << ',' << s.chosen_arm << ',' << s.observed_outcome;
    for (double p : s.mixed.probs) out << ',' << p;
    out << ',' << s.delta << '\n';
  }
  return out.str();
}

}  // namespace mad
