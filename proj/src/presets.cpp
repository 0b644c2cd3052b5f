#include "mad/presets.hpp"

namespace mad {

Design unclipped_mad() { return {"unclipped_mad", DeltaSchedule::power(0.24)}; }
Design clipped_mad() { return {"clipped_mad", DeltaSchedule::clipped_max(0.24, 0.2)}; }

namespace {

Setting bernoulli_setting(std::string label, double p0, double p1) {
  OutcomeModelSpec spec;
  spec.kind = OutcomeKind::bernoulli;
  spec.base.location = {p0, p1};
  return {std::move(label), spec};
}

Setting location_setting(std::string label, OutcomeKind kind, double mu0, double mu1, double df = 1.0) {
  OutcomeModelSpec spec;
  spec.kind = kind;
  spec.base.location = {mu0, mu1};
  spec.base.df = df;
  return {std::move(label), spec};
}

std::vector<Setting> fig1_settings() {
  return {bernoulli_setting("ate_0.0", 0.5, 0.5), bernoulli_setting("ate_0.2", 0.6, 0.8),
          bernoulli_setting("ate_0.6", 0.2, 0.8)};
}

std::vector<ExperimentPreset> build_catalog() {
  std::vector<ExperimentPreset> out;

  {
    ExperimentPreset p;
    p.name = "fig1";
    p.description = "Bernoulli outcomes, Beta-Bernoulli Thompson sampling, four designs";
    p.group = "bernoulli outcomes, Thompson sampling";
    p.settings = fig1_settings();
    p.policy = {PolicyKind::beta_bernoulli_ts};
    p.designs = {Design::bernoulli(), Design::standard_bandit(), unclipped_mad(), clipped_mad()};
    out.push_back(p);

    p.name = "fig1_ucb";
    p.description = "Bernoulli outcomes with UCB1 as the adaptive algorithm";
    p.group = "bernoulli outcomes, UCB";
    p.policy = {PolicyKind::ucb1};
    out.push_back(p);
  }

  {
    ExperimentPreset p;
    p.name = "normal";
    p.description = "Normal outcomes with unit scale, Gaussian Thompson sampling";
    p.group = "normal outcomes";
    p.settings = {location_setting("ate_0", OutcomeKind::normal, 1.0, 1.0),
                  location_setting("ate_1", OutcomeKind::normal, 1.0, 2.0),
                  location_setting("ate_3", OutcomeKind::normal, 1.0, 4.0)};
    p.policy = {PolicyKind::gaussian_ts};
    p.designs = {Design::bernoulli(), Design::standard_bandit(), {"mad", DeltaSchedule::power(0.24)}};
    p.horizon = 1000;
    p.t_star = 1000;
    out.push_back(p);

    p.name = "student_t";
    p.description = "Student-t outcomes (misspecified Gaussian Thompson sampling)";
    p.group = "heavy-tailed outcomes";
    p.settings = {location_setting("df_3", OutcomeKind::student_t, 1.0, 2.0, 3.0),
                  location_setting("df_5", OutcomeKind::student_t, 1.0, 2.0, 5.0),
                  location_setting("df_10", OutcomeKind::student_t, 1.0, 2.0, 10.0)};
    p.designs = {Design::bernoulli(), Design::standard_bandit(), {"mad", DeltaSchedule::power(0.2)}};
    p.misspecified = true;
    out.push_back(p);

    p.name = "cauchy";
    p.description = "Cauchy outcomes (misspecified; the ATE is not well defined)";
    p.group = "heavy-tailed outcomes";
    p.settings = {location_setting("ate_0", OutcomeKind::cauchy, 1.0, 1.0),
                  location_setting("ate_1", OutcomeKind::cauchy, 1.0, 2.0),
                  location_setting("ate_3", OutcomeKind::cauchy, 1.0, 4.0)};
    out.push_back(p);
  }

  {
    ExperimentPreset p;
    p.policy = {PolicyKind::ucb1};
    p.designs = {Design::bernoulli(), {"mad", DeltaSchedule::power(0.24)}};

    Setting drop = bernoulli_setting("ate_0.6_to_0.1", 0.2, 0.8);
    drop.outcome.changepoints.push_back({501, {{0.2, 0.4}}});
    p.name = "nonstat_a";
    p.description = "Step change in the ATE from 0.6 to 0.1 after unit 500, UCB";
    p.group = "non-stationary effect";
    p.settings = {drop};
    out.push_back(p);

    Setting flip = bernoulli_setting("ate_0.6_to_-0.1", 0.2, 0.8);
    flip.outcome.changepoints.push_back({501, {{0.2, 0.1}}});
    p.name = "nonstat_b";
    p.description = "Sign flip in the ATE from 0.6 to -0.1 after unit 500, UCB";
    p.group = "non-stationary effect";
    p.settings = {flip};
    out.push_back(p);
  }

  {
    ExperimentPreset p;
    p.policy = {PolicyKind::ucb1};
    p.designs = {{"mad", DeltaSchedule::power(0.24)}, Design::bernoulli()};
    p.stopping_race = true;

    p.name = "race_high";
    p.description = "Stopping-rule race between MAD (UCB) and Bernoulli, high signal (0.2, 0.8)";
    p.group = "stopping race";
    p.settings = {bernoulli_setting("high_signal", 0.2, 0.8)};
    out.push_back(p);

    p.name = "race_low";
    p.description = "Stopping-rule race between MAD (UCB) and Bernoulli, low signal (0.2, 0.3)";
    p.group = "stopping race";
    p.settings = {bernoulli_setting("low_signal", 0.2, 0.3)};
    out.push_back(p);
  }

  {
    ExperimentPreset p;
    p.name = "howard_compare";
    p.description = "Asymptotic vs nonasymptotic confidence sequences, constant-delta MAD with Thompson sampling";
    p.group = "nonasymptotic comparison";
    p.settings = fig1_settings();
    p.policy = {PolicyKind::beta_bernoulli_ts};
    p.designs = {Design::bernoulli(), Design::standard_bandit(), {"constant_mad", DeltaSchedule::constant(0.2)}};
    p.nonasymptotic.enabled = true;
    p.nonasymptotic.boundary = NonAsymptoticOptions::BoundaryKind::stitched;
    out.push_back(p);
  }

  {
    ExperimentPreset p;
    p.name = "regret_decomp";
    p.description = "Constant delta = 0.5 MAD against its Bernoulli and bandit components";
    p.group = "regret";
    p.settings = {bernoulli_setting("ate_0.6", 0.2, 0.8)};
    p.policy = {PolicyKind::beta_bernoulli_ts};
    p.designs = {Design::bernoulli(), Design::standard_bandit(), {"half_mad", DeltaSchedule::constant(0.5)}};
    p.replicates = 200;
    out.push_back(p);
  }

  {
    ExperimentPreset p;
    p.name = "three_arm";
    p.description = "Three-arm Bernoulli extension, pairwise sequences against arm 0";
    p.group = "multiple arms";
    OutcomeModelSpec spec;
    spec.base.location = {0.2, 0.5, 0.8};
    p.settings = {{"three_arm", spec}};
    p.policy = {PolicyKind::beta_bernoulli_ts, 200};
    p.replicates = 20;
    p.designs = {Design::bernoulli(), clipped_mad()};
    out.push_back(p);
  }

  return out;
}

}  // namespace

const std::vector<ExperimentPreset>& preset_catalog() {
  static const std::vector<ExperimentPreset> catalog = build_catalog();
  return catalog;
}

std::optional<ExperimentPreset> find_preset(std::string_view name) {
  for (const auto& p : preset_catalog()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

}  // namespace mad
