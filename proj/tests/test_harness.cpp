#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mad/error.hpp"
#include "mad/harness.hpp"
#include "mad/presets.hpp"

using namespace mad;

namespace {

ExperimentPreset small_preset() {
  ExperimentPreset p = *find_preset("fig1");
  p.horizon = 300;
  p.replicates = 6;
  return p;
}

std::string validation_field(const ExperimentPreset& p) {
  try {
    p.validate();
  } catch (const ParameterError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("curve accumulator computes mean and standard error per step") {
  CurveAccumulator acc;
  acc.add(std::vector<double>{1.0, 2.0, 3.0});
  acc.add(std::vector<double>{3.0, 2.0});
  acc.add(std::vector<double>{5.0, 8.0});
  const CurveStat stat = acc.finish();
  REQUIRE(stat.size() == 3);
  CHECK(acc.replicates() == 3);
  CHECK(stat.mean_at(1) == doctest::Approx(3.0));
  CHECK(stat.se_at(1) == doctest::Approx(2.0 / std::sqrt(3.0)));
  CHECK(stat.mean_at(2) == doctest::Approx(4.0));
  CHECK(stat.se_at(2) == doctest::Approx(std::sqrt(12.0) / std::sqrt(3.0)));
  CHECK(stat.mean_at(3) == doctest::Approx(3.0));
  CHECK(stat.se_at(3) == 0.0);
  CHECK(stat.count == std::vector<std::size_t>{3, 3, 1});
}

TEST_CASE("design seeds depend on label and replicate") {
  CHECK(design_seed(1, "bernoulli") == design_seed(1, "bernoulli"));
  CHECK(design_seed(1, "bernoulli") != design_seed(1, "clipped_mad"));
  CHECK(design_seed(1, "bernoulli") != design_seed(2, "bernoulli"));
}

TEST_CASE("catalog presets validate and include the documented names") {
  for (const auto& p : preset_catalog()) {
    CAPTURE(p.name);
    CHECK_NOTHROW(p.validate());
    CHECK_FALSE(p.description.empty());
  }
  for (const char* name : {"fig1", "fig1_ucb", "normal", "student_t", "cauchy", "nonstat_a", "nonstat_b", "race_high",
                           "race_low", "howard_compare"}) {
    CHECK(find_preset(name).has_value());
  }
  CHECK_FALSE(find_preset("fig9").has_value());
  CHECK(find_preset("student_t")->misspecified);
  CHECK(find_preset("cauchy")->misspecified);
  CHECK(find_preset("race_high")->stopping_race);
  CHECK(find_preset("howard_compare")->nonasymptotic.enabled);
}

TEST_CASE("preset validation reports field paths") {
  auto p = small_preset();
  p.designs[1].label = p.designs[0].label;
  CHECK(validation_field(p) == "designs[1].label");

  p = small_preset();
  p.designs[2].schedule = DeltaSchedule::power(-1.0);
  CHECK(validation_field(p) == "designs[2].schedule.a");

  p = small_preset();
  p.settings[1].outcome.base.location[0] = 2.0;
  CHECK(validation_field(p) == "settings[1].outcome.params[0]");

  p = small_preset();
  p.alpha = 0.0;
  CHECK(validation_field(p) == "alpha");

  p = small_preset();
  p.replicates = 0;
  CHECK(validation_field(p) == "replicates");

  p = *find_preset("normal");
  p.policy.kind = PolicyKind::beta_bernoulli_ts;
  CHECK(validation_field(p) == "policy.kind");


  p = small_preset();
  p.designs.clear();
  CHECK_THROWS_AS(run_preset(p, 0), ParameterError);
}

TEST_CASE("run_preset produces every metric for every design") {
  const auto p = small_preset();
  const auto result = run_preset(p, 3);
  CHECK(result.curves.curves.size() == p.settings.size() * p.designs.size());
  CHECK(result.eta == doctest::Approx(eta_for_horizon(0.05, 10000)));
  for (const auto& c : result.curves.curves) {
    for (const char* m : {"coverage", "stopped", "reward", "width", "radius", "center", "true_ate"}) {
      CAPTURE(m);
      REQUIRE(c.metric(m).size() == p.horizon);
    }
    CHECK(c.replicates.size() == p.replicates);
    for (std::size_t t = 1; t <= p.horizon; ++t) {
      REQUIRE(c.metric("coverage").mean_at(t) >= 0.0);
      REQUIRE(c.metric("coverage").mean_at(t) <= 1.0);
    }
  }
  CHECK_THROWS_AS(result.curves.curves[0].metric("nonsense"), ParameterError);
  CHECK_THROWS_AS(result.curves.find("ate_0.2", "nonsense"), ParameterError);
}

TEST_CASE("run_preset is reproducible and independent of the thread count") {
  const auto p = small_preset();
  const auto a = run_preset(p, 11, RunOptions{1, true});
  const auto b = run_preset(p, 11, RunOptions{3, true});
  const auto c = run_preset(p, 12, RunOptions{1, true});
  CHECK(metrics_csv(a) == metrics_csv(b));
  CHECK(raw_tracks_csv(a) == raw_tracks_csv(b));
  CHECK(metrics_csv(a) != metrics_csv(c));
}

TEST_CASE("designs within a replicate share one potential-outcome table") {
  auto p = small_preset();
  p.replicates = 2;
  const auto result = run_preset(p, 5, RunOptions{1, true});
  const auto& bern = result.curves.find("ate_0.6", "bernoulli");
  const auto& mad = result.curves.find("ate_0.6", "clipped_mad");
  for (std::size_t r = 0; r < 2; ++r) CHECK(bern.raw[r].true_ate == mad.raw[r].true_ate);
}

TEST_CASE("metrics CSV layout") {
  auto p = small_preset();
  p.horizon = 20;
  p.replicates = 2;
  const auto csv = metrics_csv(run_preset(p, 1));
  CHECK(csv.rfind("setting,design,contrast,t,metric,mean,se\n", 0) == 0);
  CHECK(csv.find("\nate_0.2,clipped_mad,1-0,20,coverage,") != std::string::npos);
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == 1 + 12 * 7 * 20);
}

TEST_CASE("nonstationary runs keep raw tracks and follow the changepoint") {
  auto p = *find_preset("nonstat_b");
  p.replicates = 3;
  const auto result = run_nonstationary(p, 2);
  const auto& c = result.curves.find(p.settings[0].label, "bernoulli");
  REQUIRE(c.raw.size() == 3);
  const auto& truth = c.metric("true_ate");
  CHECK(truth.mean_at(500) > 0.5);
  CHECK(truth.mean_at(1000) < truth.mean_at(500));
  CHECK(raw_tracks_csv(result).rfind("setting,design,contrast,replicate,t,center,radius,true_ate\n", 0) == 0);

  auto stationary = small_preset();
  stationary.replicates = 2;
  CHECK(metrics_csv(run_nonstationary(stationary, 4)) == metrics_csv(run_preset(stationary, 4)));
}

TEST_CASE("nonasymptotic metrics appear when enabled") {
  auto p = *find_preset("howard_compare");
  p.horizon = 200;
  p.replicates = 2;
  const auto result = run_preset(p, 1);
  for (const auto& c : result.curves.curves) {
    CHECK(c.metric("coverage_nonasymptotic").size() == 200);
    CHECK(c.metric("width_nonasymptotic").size() == 200);
  }
}

TEST_CASE("batched presets index metrics by batch") {
  auto p = small_preset();
  p.mode = AssignmentMode::batched(7);
  p.replicates = 2;
  const auto result = run_preset(p, 1);
  for (const auto& c : result.curves.curves) CHECK(c.metric("coverage").size() == 300 / 7);
}

TEST_CASE("multi-arm presets report one contrast per treatment arm") {
  auto p = *find_preset("three_arm");
  p.horizon = 100;
  p.replicates = 2;
  p.policy.mc_draws = 50;
  const auto result = run_preset(p, 1);
  CHECK(result.curves.curves.size() == 2 * p.designs.size());
  CHECK(result.curves.find("three_arm", "bernoulli", 2).pair == ArmPair{2, 0});
  CHECK(metrics_csv(result).find(",2-0,") != std::string::npos);
}

TEST_CASE("stopping race bookkeeping") {
  RaceReplicate r;
  r.mad_stop = 40;
  r.bernoulli_stop = 30;
  CHECK(r.stop_gap(100) == 10);
  r.mad_stop.reset();
  CHECK(r.stop_gap(100) == 70);
  r.bernoulli_stop.reset();
  CHECK(r.stop_gap(100) == 0);

  StoppingRaceResult race;
  race.horizon = 100;
  for (long long m : {10, 50, 20}) {
    RaceReplicate x;
    x.mad_stop = static_cast<std::size_t>(m);
    x.bernoulli_stop = 30;
    x.mad_reward = {0.5};
    x.bernoulli_reward = {0.25};
    race.replicates.push_back(x);
  }
  CHECK(race.median_gap() == -10.0);
  CHECK(race.max_bernoulli_lead() == 20);
  CHECK(race.mean_final_reward_mad() == doctest::Approx(0.5));
  CHECK(race.mean_final_reward_bernoulli() == doctest::Approx(0.25));
}

TEST_CASE("stopping race runs share tables and truncate at the MAD stop") {
  auto p = *find_preset("race_high");
  const auto race = run_stopping_race(p.settings[0].outcome, p.designs[0], p.policy, 4, 2000, 9, 0.05,
                                      eta_for_horizon(0.05, 10000));
  REQUIRE(race.replicates.size() == 4);
  for (const auto& r : race.replicates) {
    CHECK(r.truncation == r.mad_stop.value_or(2000));
    CHECK(r.mad_reward.size() == r.truncation);
    CHECK(r.bernoulli_reward.size() == r.truncation);
  }
  CHECK(race_csv(race).rfind("replicate,mad_stop,bernoulli_stop,gap,truncation,best_arm,mad_reward,bernoulli_reward\n",
                             0) == 0);
  auto full = p;
  full.replicates = 3;
  full.horizon = 1000;
  const auto result = run_preset(full, 2);
  REQUIRE(result.race.has_value());
  CHECK(result.race->replicates.size() == 3);
}

TEST_CASE("design assignment floors") {
  CHECK(design_p_min(Design::bernoulli(), 2, 100) == 0.5);
  CHECK(design_p_min({"c", DeltaSchedule::constant(0.2)}, 2, 100) == doctest::Approx(0.1));
  CHECK(design_p_min(clipped_mad(), 2, 1000000) == doctest::Approx(0.1));
  CHECK(design_p_min(unclipped_mad(), 2, 1000000) == doctest::Approx(0.03630780547701013 / 2.0));
  CHECK(design_p_min(Design::standard_bandit(), 2, 1000) == doctest::Approx(0.001));
}

TEST_CASE("stitched nonasymptotic sequences are wider than the asymptotic ones") {
  auto p = *find_preset("howard_compare");
  p.horizon = 2000;
  p.replicates = 3;
  const auto result = run_preset(p, 1);
  const auto& c = result.curves.find("ate_0.6", "constant_mad");
  for (const auto& s : c.replicates) CHECK(s.nonasymptotic_wider);
  p.nonasymptotic.boundary = NonAsymptoticOptions::BoundaryKind::normal_mixture;
  CHECK(metrics_csv(run_preset(p, 1)) != metrics_csv(result));
}
