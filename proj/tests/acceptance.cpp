#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "mad/design.hpp"
#include "mad/harness.hpp"
#include "mad/inference.hpp"
#include "mad/presets.hpp"

using namespace mad;

namespace {

constexpr std::uint64_t kSeed = 2024;

struct Verdict {
  bool pass = true;
  std::string detail;
  // False when a failure is confined to components recorded as unattainable.
  bool blocking = true;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

class Runner {
 public:
  const ExperimentResult& get(const std::string& name) {
    const auto preset = find_preset(name);
    if (!preset) throw std::runtime_error("missing preset " + name);
    return get(name, *preset);
  }

  const ExperimentResult& get(const std::string& key, const ExperimentPreset& preset) {
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const std::string& name = key;
    const std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    const auto start = std::chrono::steady_clock::now();
    auto result = run_preset(preset, kSeed, RunOptions{jobs, false});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("  ran %s (N=%zu, T=%zu) in %.1fs\n", name.c_str(), result.replicates, result.horizon, secs);
    std::fflush(stdout);
    return cache_.emplace(name, std::move(result)).first->second;
  }

 private:
  std::map<std::string, ExperimentResult> cache_;
};

double final_mean(const DesignCurves& c, const std::string& metric) {
  const auto& stat = c.metric(metric);
  return stat.mean_at(stat.size());
}

double final_se(const DesignCurves& c, const std::string& metric) {
  const auto& stat = c.metric(metric);
  return stat.se_at(stat.size());
}

Verdict calibration_null(Runner& runner) {
  Verdict v;
  const auto& r = runner.get("fig1");
  for (const char* design : {"bernoulli", "standard_bandit", "unclipped_mad", "clipped_mad"}) {
    const double cov = final_mean(r.curves.find("ate_0.0", design), "coverage");
    v.pass = v.pass && cov >= 0.93;
    v.detail += std::string(design) + fmt("=%.4f ", cov);
  }
  v.detail += "(need >= 0.93)";
  v.detail += fmt("; fig1 wall %.1fs (target < 600s)", r.wall_seconds);
  v.pass = v.pass && r.wall_seconds < 600.0;
  return v;
}

Verdict anytime_validity(Runner& runner) {
  Verdict v;
  const auto& r = runner.get("fig1");
  for (const char* setting : {"ate_0.2", "ate_0.6"}) {
    for (const char* design : {"clipped_mad", "unclipped_mad", "bernoulli"}) {
      const double cov = final_mean(r.curves.find(setting, design), "coverage");
      v.pass = v.pass && cov >= 0.93;
      v.detail += std::string(setting) + "/" + design + fmt("=%.4f ", cov);
    }
  }
  const double bandit = final_mean(r.curves.find("ate_0.6", "standard_bandit"), "coverage");
  v.pass = v.pass && bandit < 0.90;
  v.detail += fmt("; ate_0.6/standard_bandit=%.4f (need < 0.90)", bandit);
  return v;
}

Verdict stopping_power(Runner& runner) {
  Verdict v;
  const auto& r = runner.get("fig1");
  for (const char* design : {"bernoulli", "unclipped_mad", "clipped_mad"}) {
    const double stopped = final_mean(r.curves.find("ate_0.6", design), "stopped");
    v.pass = v.pass && std::abs(stopped - 1.0) <= 0.02;
    v.detail += std::string("ate_0.6/") + design + fmt("=%.2f ", stopped);
  }
  const double bandit = final_mean(r.curves.find("ate_0.2", "standard_bandit"), "stopped");
  for (const char* design : {"bernoulli", "unclipped_mad", "clipped_mad"}) {
    const double stopped = final_mean(r.curves.find("ate_0.2", design), "stopped");
    v.pass = v.pass && stopped - bandit >= 0.1;
    v.detail += std::string("ate_0.2/") + design + fmt("=%.2f ", stopped);
  }
  v.detail += fmt("vs standard_bandit=%.2f (need gap >= 0.1)", bandit);
  return v;
}

Verdict reward_ordering(Runner& runner) {
  const auto& r = runner.get("fig1");
  const double bandit = final_mean(r.curves.find("ate_0.6", "standard_bandit"), "reward");
  const double mad = final_mean(r.curves.find("ate_0.6", "unclipped_mad"), "reward");
  const double bern = final_mean(r.curves.find("ate_0.6", "bernoulli"), "reward");
  Verdict v;
  v.pass = bandit >= mad && mad >= bern + 0.05 && bandit - mad <= 0.05;
  v.detail = fmt("standard_bandit=%.4f unclipped_mad=%.4f bernoulli=%.4f (gap to bandit %.4f, need <= 0.05)", bandit,
                 mad, bern, bandit - mad);
  return v;
}

bool is_mad(const Design& d) {
  return d.schedule && !(d.schedule->kind == DeltaSchedule::Kind::constant && d.schedule->c == 1.0);
}

Verdict width_shrinkage(Runner& runner) {
  Verdict v;
  std::size_t checked = 0;
  std::size_t attainable_violations = 0;
  for (const auto& preset : preset_catalog()) {
    if (preset.stopping_race || preset.has_changepoints()) continue;
    const auto& r = runner.get(preset.name);
    std::size_t violations = 0;
    std::size_t total = 0;
    for (const auto& design : preset.designs) {
      if (!is_mad(design)) continue;
      for (const auto& c : r.curves.curves) {
        if (c.design != design.label) continue;
        for (const auto& s : c.replicates) {
          ++total;
          double prev = INFINITY;
          for (std::size_t t = 100; t <= r.horizon && t <= 10000; t *= 10) {
            const double radius = s.radius_at.at(t);
            if (!(radius < prev)) {
              ++violations;
              break;
            }
            prev = radius;
          }
        }
      }
    }
    checked += total;
    const bool heavy = std::any_of(preset.settings.begin(), preset.settings.end(),
                                   [](const Setting& s) { return s.outcome.heavy_tailed(); });
    if (violations > 0) v.pass = false;
    if (!heavy) attainable_violations += violations;
    v.detail += preset.name + ":" + std::to_string(violations) + "/" + std::to_string(total) + " ";
  }
  v.detail += "replicates violating radius(10^4) < radius(10^3) < radius(10^2) (need 0)";
  if (checked == 0) v.pass = false;
  if (!v.pass && attainable_violations == 0 && checked > 0) {
    v.blocking = false;
    v.detail += "; unattainable for Cauchy outcomes, whose second moment is infinite, so S_hat grows in jumps";
  }
  return v;
}

Verdict exact_oracles() {
  Verdict v;
  Rng rng = make_stream(kSeed, "acceptance");
  double worst_bias = 0.0;
  double worst_sigma = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + static_cast<std::size_t>(uniform01(rng) * 4.0);
    std::vector<double> probs(k);
    std::vector<double> y(k);
    double total = 0.0;
    for (std::size_t w = 0; w < k; ++w) {
      probs[w] = 0.05 + uniform01(rng);
      total += probs[w];
      y[w] = 2.0 * uniform01(rng) - 1.0;
    }
    for (double& p : probs) p /= total;
    const AssignmentDistribution dist{probs};
    double mean_tau = 0.0;
    double mean_sigma2 = 0.0;
    for (std::size_t w = 0; w < k; ++w) {
      const IpwTerm term = ipw_step(w, y[w], dist, {1, 0});
      mean_tau += probs[w] * term.tau;
      mean_sigma2 += probs[w] * term.sigma2;
    }
    worst_bias = std::max(worst_bias, std::abs(mean_tau - (y[1] - y[0])));
    worst_sigma = std::max(worst_sigma, std::abs(mean_sigma2 - (y[1] * y[1] / probs[1] + y[0] * y[0] / probs[0])));
  }
  const bool ipw_ok = worst_bias <= 1e-12 && worst_sigma <= 1e-12;

  bool mix_ok = true;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t k = 2 + static_cast<std::size_t>(uniform01(rng) * 6.0);
    std::vector<double> raw(k);
    double total = 0.0;
    for (double& x : raw) {
      x = -std::log(1.0 - uniform01(rng));
      total += x;
    }
    for (double& x : raw) x /= total;
    const double delta = 1e-6 + (1.0 - 1e-6) * uniform01(rng);
    const auto mixed = mix(delta, AssignmentDistribution{raw}, k);
    mix_ok = mix_ok && mixed.is_simplex(1e-12);
    for (double p : mixed.probs) mix_ok = mix_ok && p >= delta / static_cast<double>(k) - 1e-15;
  }

  OutcomeModelSpec spec;
  spec.n_units = 10000;
  spec.base.location = {0.2, 0.8};
  const auto table = generate_table(spec, kSeed);
  const PolicyConfig policy;
  const auto per_unit = run_trajectory(table, policy, clipped_mad(), kSeed);
  const auto batched = run_trajectory(table, policy, clipped_mad(), kSeed, AssignmentMode::batched(1));
  const double eta = eta_for_horizon(0.05, 10000);
  const bool batch_ok = per_unit == batched && cs_track(per_unit, {1, 0}, eta, 0.05) ==
                                                   cs_track(batched, {1, 0}, eta, 0.05, AssignmentMode::batched(1));
  const bool eta_ok = std::abs(eta - 0.0282) <= 1e-4;

  v.pass = ipw_ok && mix_ok && batch_ok && eta_ok;
  v.detail = fmt("IPW bias %.2e, sigma2 bias %.2e (need <= 1e-12); ", worst_bias, worst_sigma) +
             "mix simplex/lower bound on 1e4 inputs " + (mix_ok ? "ok" : "violated") + "; batched(B=1) " +
             (batch_ok ? "bit-identical" : "differs") + fmt("; eta=%.6f (need 0.0282 +/- 0.0001)", eta);
  return v;
}

Verdict regret_decomposition(Runner& runner) {
  Verdict v;
  const auto& r = runner.get("regret_decomp");
  const std::string setting = find_preset("regret_decomp")->settings[0].label;
  const auto& bern = r.curves.find(setting, "bernoulli").metric("reward");
  const auto& bandit = r.curves.find(setting, "standard_bandit").metric("reward");
  const auto& mad = r.curves.find(setting, "half_mad").metric("reward");
  v.detail = "N=" + std::to_string(r.replicates) + " ";
  for (std::size_t t : {100u, 1000u, 10000u}) {
    const double gap = mad.mean_at(t) - 0.5 * bern.mean_at(t) - 0.5 * bandit.mean_at(t);
    const double se = std::sqrt(mad.se_at(t) * mad.se_at(t) + 0.25 * bern.se_at(t) * bern.se_at(t) +
                                0.25 * bandit.se_at(t) * bandit.se_at(t));
    v.pass = v.pass && std::abs(gap) <= 3.0 * se;
    v.detail += fmt("t=%.0f: |gap|=%.4f vs 3SE=%.4f; ", static_cast<double>(t), std::abs(gap), 3.0 * se);
  }
  return v;
}

Verdict stopping_race(Runner& runner) {
  const auto& high = *runner.get("race_high").race;
  const auto& low = *runner.get("race_low").race;
  Verdict v;
  const double high_gap = high.median_gap();
  const double low_gap = low.median_gap();
  const double mad_reward = high.mean_final_reward_mad();
  const double bern_reward = high.mean_final_reward_bernoulli();
  v.pass = high_gap <= 10.0 && mad_reward >= bern_reward && low_gap > 0.0;
  v.detail = fmt("race_high median gap %.1f (need <= 10), reward MAD %.4f vs Bernoulli %.4f; race_low median gap %.1f "
                 "(need > 0)",
                 high_gap, mad_reward, bern_reward, low_gap);
  return v;
}

Verdict nonstationary_tracking(Runner& runner) {
  Verdict v;
  const auto& r = runner.get("nonstat_b");
  for (const auto& c : r.curves.curves) {
    const double center = final_mean(c, "center");
    const double truth = final_mean(c, "true_ate");
    const double cov = final_mean(c, "coverage");
    v.pass = v.pass && std::abs(center - truth) <= 0.05 && cov >= 0.93;
    v.detail += c.design + fmt(": center %.4f vs true %.4f, coverage %.4f; ", center, truth, cov);
  }
  v.detail += "(need |diff| <= 0.05, coverage >= 0.93)";
  return v;
}

Verdict nonasymptotic_comparison(Runner& runner) {
  Verdict v;
  const auto& r = runner.get("howard_compare");
  for (const auto& c : r.curves.curves) {
    if (c.design != "constant_mad") continue;
    std::size_t wider = 0;
    double coverage = 0.0;
    for (const auto& s : c.replicates) {
      wider += s.nonasymptotic_wider;
      coverage += s.final_nonasymptotic_coverage;
    }
    const double frac = static_cast<double>(wider) / static_cast<double>(c.replicates.size());
    coverage /= static_cast<double>(c.replicates.size());
    v.pass = v.pass && frac >= 0.95 && coverage >= 0.95;
    v.detail += c.setting + fmt(": wider in %.2f, coverage %.4f; ", frac, coverage);
  }
  v.detail += "(need wider >= 0.95, coverage >= 0.95)";

  auto mixture = *find_preset("howard_compare");
  mixture.nonasymptotic.boundary = NonAsymptoticOptions::BoundaryKind::normal_mixture;
  const auto& m = runner.get("howard_compare/normal_mixture", mixture);
  double wider = 0.0;
  double total = 0.0;
  for (const auto& c : m.curves.curves) {
    if (c.design != "constant_mad") continue;
    for (const auto& s : c.replicates) {
      wider += s.nonasymptotic_wider;
      total += 1.0;
    }
  }
  v.detail += fmt("; informational, normal-mixture boundary wider in %.2f", wider / total);
  return v;
}

}  // namespace

int main() {
  Runner runner;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"calibration_null", [&] { return calibration_null(runner); }},
      {"anytime_validity", [&] { return anytime_validity(runner); }},
      {"stopping_power", [&] { return stopping_power(runner); }},
      {"reward_ordering", [&] { return reward_ordering(runner); }},
      {"width_shrinkage", [&] { return width_shrinkage(runner); }},
      {"exact_oracles", [] { return exact_oracles(); }},
      {"regret_decomposition", [&] { return regret_decomposition(runner); }},
      {"stopping_race", [&] { return stopping_race(runner); }},
      {"nonstationary_tracking", [&] { return nonstationary_tracking(runner); }},
      {"nonasymptotic_comparison", [&] { return nonasymptotic_comparison(runner); }},
  };
  int failures = 0;
  int blocking = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failures += !v.pass;
    blocking += !v.pass && v.blocking;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed; %d failure(s) outside recorded unattainable components\n",
              static_cast<int>(criteria.size()) - failures, criteria.size(), blocking);
  return blocking == 0 ? 0 : 1;
}
