#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mad/design.hpp"
#include "mad/inference.hpp"
#include "mad/outcome_models.hpp"
#include "mad/policies.hpp"

namespace mad {

// One outcome model within a preset (a column of the metric grid). The outcome's
// n_units is overwritten by the preset horizon.
struct Setting {
  std::string label;
  OutcomeModelSpec outcome;

  bool operator==(const Setting&) const = default;
};

struct NonAsymptoticOptions {
  enum class BoundaryKind { normal_mixture, stitched };

  bool enabled = false;
  BoundaryKind boundary = BoundaryKind::normal_mixture;
  std::optional<double> rho;                // defaults to optimal_rho(target, alpha)
  double target_intrinsic_time = 1e4;
  // Stitched boundary only: |Y| <= outcome_bound, so IPW terms span
  // 2 * outcome_bound / p_min.
  double outcome_bound = 1.0;

  double resolved_rho(double alpha) const;
  bool operator==(const NonAsymptoticOptions&) const = default;
};

struct ExperimentPreset {
  std::string name;
  std::string description;
  std::string group;
  std::vector<Setting> settings;
  PolicyConfig policy;
  std::vector<Design> designs;
  std::size_t horizon = 10000;
  std::size_t replicates = 100;
  double alpha = 0.05;
  std::optional<double> eta;  // derived from t_star when empty
  std::uint64_t t_star = 10000;
  AssignmentMode mode;
  std::size_t control = 0;
  NonAsymptoticOptions nonasymptotic;
  // Race presets: designs[0] is the MAD design, designs[1] the Bernoulli one.
  bool stopping_race = false;
  // Heavy-tailed outcomes where the estimand is not well defined; no coverage
  // claims are made.
  bool misspecified = false;

  void validate() const;
  double resolved_eta() const;
  bool has_changepoints() const;
  bool operator==(const ExperimentPreset&) const = default;
};

// Per-step mean and standard error across replicates. `count` records how many
// replicates reached each step (varies only for truncated race curves).
struct CurveStat {
  std::vector<double> mean;
  std::vector<double> se;
  std::vector<std::size_t> count;

  std::size_t size() const noexcept { return mean.size(); }
  double mean_at(std::size_t t) const { return mean.at(t - 1); }
  double se_at(std::size_t t) const { return se.at(t - 1); }
};

// Welford accumulation over replicates, one slot per time index. Replicates
// must be added in a fixed order for bit-reproducible output.
class CurveAccumulator {
 public:
  void add(std::span<const double> curve);
  CurveStat finish() const;
  std::size_t replicates() const noexcept { return replicates_; }

 private:
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::vector<std::size_t> count_;
  std::size_t replicates_ = 0;
};

struct ReplicateSummary {
  std::size_t replicate = 0;
  std::optional<std::size_t> stop_time;
  std::optional<std::size_t> nonasymptotic_stop_time;
  std::map<std::size_t, double> radius_at;  // decade checkpoints 10, 100, ... <= horizon
  double final_center = 0.0;
  double final_true_ate = 0.0;
  double final_coverage = 0.0;
  double final_nonasymptotic_coverage = 0.0;
  // nonasymptotic radius >= asymptotic radius at every t >= 100
  bool nonasymptotic_wider = false;
};

struct RawTrack {
  std::size_t replicate = 0;
  std::vector<double> center;
  std::vector<double> radius;
  std::vector<double> true_ate;
};

struct DesignCurves {
  std::string setting;
  std::string design;
  ArmPair pair;
  std::map<std::string, CurveStat> metrics;
  std::vector<ReplicateSummary> replicates;
  std::vector<RawTrack> raw;

  const CurveStat& metric(const std::string& name) const;
};

struct MetricCurves {
  std::vector<DesignCurves> curves;

  const DesignCurves& find(const std::string& setting, const std::string& design,
                           std::optional<std::size_t> treatment = std::nullopt) const;
};

// Everything one design contributes for one replicate; the input to
// compute_metrics.
struct ReplicateObservation {
  std::size_t replicate = 0;
  ConfidenceSequenceTrack track;
  std::optional<NonAsymptoticTrack> nonasymptotic;
  std::vector<double> true_ate;  // aligned with track indices
  std::vector<double> reward;    // running mean of observed outcomes, aligned with track indices
};

// Per-replicate metric curves, keyed by metric name.
std::map<std::string, std::vector<double>> replicate_curves(const ReplicateObservation& obs);

ReplicateSummary summarize(const ReplicateObservation& obs);

// Aggregates replicate observations of one design into mean/se curves.
DesignCurves compute_metrics(std::span<const ReplicateObservation> observations);

// Observation for one design/replicate. Aligns true ATE and rewards to the
// track's time index (batch ends in batched mode).
// p_min is the assignment-probability floor assumed by the stitched boundary.
ReplicateObservation observe(const Trajectory& trajectory, const PotentialOutcomeTable& table,
                             ArmPair pair, double eta, double alpha,
                             const NonAsymptoticOptions& nonasymptotic, std::size_t replicate,
                             double p_min = 0.0);

// Assignment-probability floor of a design over a horizon: delta_T / K for
// scheduled designs, 1 / T for the standard bandit.
double design_p_min(const Design& design, std::size_t n_arms, std::size_t horizon);

std::string_view to_string(NonAsymptoticOptions::BoundaryKind kind);
NonAsymptoticOptions::BoundaryKind boundary_kind_from_string(std::string_view name);

struct RaceReplicate {
  std::size_t replicate = 0;
  std::optional<std::size_t> mad_stop;
  std::optional<std::size_t> bernoulli_stop;
  std::size_t truncation = 0;  // MAD stop time, or the horizon
  std::size_t bernoulli_best_arm = 0;
  std::vector<double> mad_reward;        // cumulative average reward up to truncation
  std::vector<double> bernoulli_reward;  // same, Bernoulli arm switched to its best arm after stopping
  std::uint64_t table_id = 0;

  // MAD stop minus Bernoulli stop, with "never" mapped to the horizon.
  long long stop_gap(std::size_t horizon) const;
};

struct StoppingRaceResult {
  std::size_t horizon = 0;
  std::vector<RaceReplicate> replicates;

  double median_gap() const;
  long long max_bernoulli_lead() const;
  double mean_final_reward_mad() const;
  double mean_final_reward_bernoulli() const;
};

struct RunOptions {
  std::size_t jobs = 1;
  bool keep_raw = false;
};

struct ExperimentResult {
  std::string preset;
  std::uint64_t base_seed = 0;
  std::size_t horizon = 0;
  std::size_t replicates = 0;
  double eta = 0.0;
  MetricCurves curves;
  std::optional<StoppingRaceResult> race;
  double wall_seconds = 0.0;
};

// Replicate r uses seed base_seed + r; one potential-outcome table per
// (replicate, setting) is shared by every design.
ExperimentResult run_preset(const ExperimentPreset& preset, std::uint64_t base_seed,
                            const RunOptions& options = {});

StoppingRaceResult run_stopping_race(const OutcomeModelSpec& outcome, const Design& mad_design,
                                     const PolicyConfig& policy, std::size_t replicates,
                                     std::size_t horizon, std::uint64_t base_seed, double alpha, double eta,
                                     std::size_t jobs = 1);

// run_preset with raw tracks kept, for overlaying per-replicate sequences.
ExperimentResult run_nonstationary(const ExperimentPreset& preset, std::uint64_t base_seed,
                                   std::size_t jobs = 1);

// Seed of the assignment streams for one design within a replicate.
std::uint64_t design_seed(std::uint64_t replicate_seed, const std::string& label);

inline constexpr int kMetricsSchemaVersion = 1;

// Long-format metrics CSV: setting,design,contrast,t,metric,mean,se.
std::string metrics_csv(const ExperimentResult& result);
// setting,design,contrast,replicate,t,center,radius,true_ate
std::string raw_tracks_csv(const ExperimentResult& result);
// replicate,mad_stop,bernoulli_stop,gap,truncation,best_arm,mad_reward,bernoulli_reward
std::string race_csv(const StoppingRaceResult& race);

}  // namespace mad
