#include "mad/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "mad/error.hpp"
#include "mad/rng.hpp"

namespace mad {

namespace {

template <typename Fn>
void validate_nested(const std::string& prefix, Fn&& fn) {
  try {
    fn();
  } catch (const ParameterError& e) {
    throw e.nested(prefix);
  }
}

// Runs fn(i) for i in [begin, end) on up to `jobs` threads.
void parallel_for(std::size_t begin, std::size_t end, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t n = end - begin;
  const std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), n);
  if (workers <= 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{begin};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < end; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::vector<double> running_mean(std::span<const double> values) {
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    out[i] = sum / static_cast<double>(i + 1);
  }
  return out;
}

std::vector<double> observed_outcomes(const Trajectory& trajectory) {
  std::vector<double> out;
  out.reserve(trajectory.size());
  for (const auto& s : trajectory.steps) out.push_back(s.observed_outcome);
  return out;
}

// Streaming form of compute_metrics, so run_preset need not hold every
// replicate in memory.
class DesignAccumulator {
 public:
  void add(const ReplicateObservation& obs, bool keep_raw) {
    pair_ = obs.track.pair;
    for (const auto& [name, curve] : replicate_curves(obs)) metrics_[name].add(curve);
    summaries_.push_back(summarize(obs));
    if (keep_raw) raw_.push_back({obs.replicate, obs.track.center, obs.track.radius, obs.true_ate});
  }

  DesignCurves finish(std::string setting, std::string design) && {
    DesignCurves out;
    out.setting = std::move(setting);
    out.design = std::move(design);
    out.pair = pair_;
    for (const auto& [name, acc] : metrics_) out.metrics.emplace(name, acc.finish());
    out.replicates = std::move(summaries_);
    out.raw = std::move(raw_);
    return out;
  }

 private:
  ArmPair pair_;
  std::map<std::string, CurveAccumulator> metrics_;
  std::vector<ReplicateSummary> summaries_;
  std::vector<RawTrack> raw_;
};

}  // namespace

double NonAsymptoticOptions::resolved_rho(double alpha) const {
  return rho ? *rho : optimal_rho(target_intrinsic_time, alpha);
}

void ExperimentPreset::validate() const {
  if (replicates < 1) throw ParameterError("replicates", "must be >= 1");
  if (horizon < 1) throw ParameterError("horizon", "must be >= 1");
  if (settings.empty()) throw ParameterError("settings", "at least one outcome setting is required");
  if (designs.empty()) throw ParameterError("designs", "at least one design is required");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha", "must lie in (0, 1)");
  if (eta && !(*eta > 0.0 && std::isfinite(*eta))) throw ParameterError("eta", "must be positive");
  if (t_star < 1) throw ParameterError("t_star", "must be >= 1");
  if (mode.batch_size < 1) throw ParameterError("mode.batch_size", "must be >= 1");
  validate_nested("policy.", [&] { policy.validate(); });
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const std::string prefix = "settings[" + std::to_string(i) + "].outcome.";
    OutcomeModelSpec spec = settings[i].outcome;
    spec.n_units = horizon;
    validate_nested(prefix, [&] { spec.validate(); });
    if (control >= spec.n_arms()) throw ParameterError("control", "arm index out of range");
    if (policy.kind == PolicyKind::beta_bernoulli_ts && spec.kind != OutcomeKind::bernoulli) {
      throw ParameterError("policy.kind", "Beta-Bernoulli Thompson sampling requires Bernoulli outcomes");
    }
  }
  for (std::size_t i = 0; i < designs.size(); ++i) {
    const std::string prefix = "designs[" + std::to_string(i) + "].";
    if (designs[i].label.empty()) throw ParameterError(prefix + "label", "must not be empty");
    for (std::size_t j = 0; j < i; ++j) {
      if (designs[j].label == designs[i].label) throw ParameterError(prefix + "label", "duplicate design label");
    }
    if (designs[i].schedule) validate_nested(prefix + "schedule.", [&] { designs[i].schedule->validate(); });
  }
  if (nonasymptotic.enabled) {
    if (nonasymptotic.rho && !(*nonasymptotic.rho > 0.0)) throw ParameterError("nonasymptotic.rho", "must be positive");
    if (!(nonasymptotic.target_intrinsic_time > 0.0)) {
      throw ParameterError("nonasymptotic.target", "must be positive");
    }
    if (!(nonasymptotic.outcome_bound > 0.0)) throw ParameterError("nonasymptotic.outcome_bound", "must be positive");
    if (mode.is_batched()) throw ParameterError("mode", "the nonasymptotic track is per-unit only");
  }
  if (stopping_race) {
    if (settings.size() != 1) throw ParameterError("settings", "a stopping race uses exactly one setting");
    if (settings[0].outcome.n_arms() != 2) throw ParameterError("settings[0].outcome.params", "a stopping race needs two arms");
    if (designs.size() != 2 || !designs[0].schedule || !designs[1].schedule) {
      throw ParameterError("designs", "a stopping race needs a MAD design followed by the Bernoulli design");
    }
    if (mode.is_batched()) throw ParameterError("mode", "stopping races are per-unit only");
  }
}

double ExperimentPreset::resolved_eta() const { return eta ? *eta : eta_for_horizon(alpha, t_star); }

bool ExperimentPreset::has_changepoints() const {
  return std::any_of(settings.begin(), settings.end(),
                     [](const Setting& s) { return !s.outcome.changepoints.empty(); });
}

void CurveAccumulator::add(std::span<const double> curve) {
  if (curve.size() > mean_.size()) {
    mean_.resize(curve.size(), 0.0);
    m2_.resize(curve.size(), 0.0);
    count_.resize(curve.size(), 0);
  }
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double n = static_cast<double>(++count_[i]);
    const double delta = curve[i] - mean_[i];
    mean_[i] += delta / n;
    m2_[i] += delta * (curve[i] - mean_[i]);
  }
  ++replicates_;
}

CurveStat CurveAccumulator::finish() const {
  CurveStat out;
  out.mean = mean_;
  out.count = count_;
  out.se.resize(mean_.size(), 0.0);
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    const double n = static_cast<double>(count_[i]);
    if (count_[i] > 1) out.se[i] = std::sqrt(m2_[i] / (n - 1.0) / n);
  }
  return out;
}

const CurveStat& DesignCurves::metric(const std::string& name) const {
  const auto it = metrics.find(name);
  if (it == metrics.end()) throw ParameterError("metric", "no metric named '" + name + "'");
  return it->second;
}

const DesignCurves& MetricCurves::find(const std::string& setting, const std::string& design,
                                       std::optional<std::size_t> treatment) const {
  for (const auto& c : curves) {
    if (c.setting == setting && c.design == design && (!treatment || c.pair.treatment == *treatment)) return c;
  }
  throw ParameterError("design", "no curves for setting '" + setting + "' and design '" + design + "'");
}

std::map<std::string, std::vector<double>> replicate_curves(const ReplicateObservation& obs) {
  const auto& track = obs.track;
  const std::size_t n = track.size();
  if (obs.true_ate.size() != n || obs.reward.size() != n) {
    throw ParameterError("observation", "track, true ATE and reward curves must be aligned");
  }
  std::map<std::string, std::vector<double>> curves;
  auto& coverage = curves["coverage"];
  auto& stopped = curves["stopped"];
  auto& width = curves["width"];
  coverage.resize(n);
  stopped.resize(n);
  width.resize(n);
  const StoppingReport stop = stopping_time(track);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(track.center[i] - obs.true_ate[i]) <= track.radius[i]) ++covered;
    coverage[i] = static_cast<double>(covered) / static_cast<double>(i + 1);
    stopped[i] = stop.stop_time && i + 1 >= *stop.stop_time ? 1.0 : 0.0;
    width[i] = 2.0 * track.radius[i];
  }
  curves["reward"] = obs.reward;
  curves["radius"] = track.radius;
  curves["center"] = track.center;
  curves["true_ate"] = obs.true_ate;

  if (obs.nonasymptotic) {
    const auto& na = *obs.nonasymptotic;
    auto& na_coverage = curves["coverage_nonasymptotic"];
    auto& na_stopped = curves["stopped_nonasymptotic"];
    auto& na_width = curves["width_nonasymptotic"];
    na_coverage.resize(n);
    na_stopped.resize(n);
    na_width.resize(n);
    const StoppingReport na_stop = stopping_time(na);
    std::size_t na_covered = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(na.center[i] - obs.true_ate[i]) <= na.radius[i]) ++na_covered;
      na_coverage[i] = static_cast<double>(na_covered) / static_cast<double>(i + 1);
      na_stopped[i] = na_stop.stop_time && i + 1 >= *na_stop.stop_time ? 1.0 : 0.0;
      na_width[i] = 2.0 * na.radius[i];
    }
  }
  return curves;
}

ReplicateSummary summarize(const ReplicateObservation& obs) {
  const auto& track = obs.track;
  ReplicateSummary s;
  s.replicate = obs.replicate;
  s.stop_time = stopping_time(track).stop_time;
  for (std::size_t t = 10; t <= track.size(); t *= 10) s.radius_at[t] = track.radius[t - 1];
  if (track.size() > 0) {
    s.final_center = track.center.back();
    s.final_true_ate = obs.true_ate.back();
    std::size_t covered = 0;
    for (std::size_t i = 0; i < track.size(); ++i) {
      if (std::abs(track.center[i] - obs.true_ate[i]) <= track.radius[i]) ++covered;
    }
    s.final_coverage = static_cast<double>(covered) / static_cast<double>(track.size());
  }
  if (obs.nonasymptotic) {
    const auto& na = *obs.nonasymptotic;
    s.nonasymptotic_stop_time = stopping_time(na).stop_time;
    s.nonasymptotic_wider = true;
    std::size_t covered = 0;
    for (std::size_t i = 0; i < na.size(); ++i) {
      if (i + 1 >= 100 && na.radius[i] < track.radius[i]) s.nonasymptotic_wider = false;
      if (std::abs(na.center[i] - obs.true_ate[i]) <= na.radius[i]) ++covered;
    }
    if (na.size() > 0) s.final_nonasymptotic_coverage = static_cast<double>(covered) / static_cast<double>(na.size());
  }
  return s;
}

DesignCurves compute_metrics(std::span<const ReplicateObservation> observations) {
  DesignAccumulator acc;
  for (const auto& obs : observations) acc.add(obs, false);
  return std::move(acc).finish("", "");
}

ReplicateObservation observe(const Trajectory& trajectory, const PotentialOutcomeTable& table, ArmPair pair,
                             double eta, double alpha, const NonAsymptoticOptions& nonasymptotic,
                             std::size_t replicate, double p_min) {
  ReplicateObservation obs;
  obs.replicate = replicate;
  obs.track = cs_track(trajectory, pair, eta, alpha, trajectory.mode);
  const std::vector<double> truth = true_ate_curve(table, pair.treatment, pair.control);
  const std::vector<double> reward = running_mean(observed_outcomes(trajectory));
  const std::size_t b = trajectory.mode.batch_size;
  obs.true_ate.resize(obs.track.size());
  obs.reward.resize(obs.track.size());
  for (std::size_t j = 0; j < obs.track.size(); ++j) {
    obs.true_ate[j] = truth[(j + 1) * b - 1];
    obs.reward[j] = reward[(j + 1) * b - 1];
  }
  if (nonasymptotic.enabled) {
    const double rho = nonasymptotic.resolved_rho(alpha);
    if (nonasymptotic.boundary == NonAsymptoticOptions::BoundaryKind::stitched) {
      if (!(p_min > 0.0)) throw ParameterError("p_min", "the stitched boundary needs a positive p_min");
      const double scale = 2.0 * nonasymptotic.outcome_bound / p_min;
      obs.nonasymptotic = nonasymptotic_track(trajectory, pair, alpha, rho,
                                              [scale, alpha](double v) { return stitched_boundary(v, scale, alpha); });
    } else {
      obs.nonasymptotic = nonasymptotic_track(trajectory, pair, alpha, rho);
    }
  }
  return obs;
}

double design_p_min(const Design& design, std::size_t n_arms, std::size_t horizon) {
  if (n_arms == 0) throw ParameterError("n_arms", "must be positive");
  if (horizon == 0) throw ParameterError("horizon", "must be positive");
  if (!design.schedule) return 1.0 / static_cast<double>(horizon);
  return evaluate_schedule(*design.schedule, horizon) / static_cast<double>(n_arms);
}

std::string_view to_string(NonAsymptoticOptions::BoundaryKind kind) {
  return kind == NonAsymptoticOptions::BoundaryKind::stitched ? "stitched" : "normal_mixture";
}

NonAsymptoticOptions::BoundaryKind boundary_kind_from_string(std::string_view name) {
  if (name == "normal_mixture") return NonAsymptoticOptions::BoundaryKind::normal_mixture;
  if (name == "stitched") return NonAsymptoticOptions::BoundaryKind::stitched;
  throw ParameterError("boundary", "expected 'normal_mixture' or 'stitched'");
}

std::uint64_t design_seed(std::uint64_t replicate_seed, const std::string& label) {
  Rng rng = make_stream(replicate_seed, "design:" + label);
  return rng();
}

long long RaceReplicate::stop_gap(std::size_t horizon) const {
  const auto mad = static_cast<long long>(mad_stop.value_or(horizon));
  const auto bern = static_cast<long long>(bernoulli_stop.value_or(horizon));
  return mad - bern;
}

double StoppingRaceResult::median_gap() const {
  if (replicates.empty()) return 0.0;
  std::vector<long long> gaps;
  gaps.reserve(replicates.size());
  for (const auto& r : replicates) gaps.push_back(r.stop_gap(horizon));
  std::sort(gaps.begin(), gaps.end());
  const std::size_t m = gaps.size() / 2;
  if (gaps.size() % 2 == 1) return static_cast<double>(gaps[m]);
  return 0.5 * static_cast<double>(gaps[m - 1] + gaps[m]);
}

long long StoppingRaceResult::max_bernoulli_lead() const {
  long long best = 0;
  for (const auto& r : replicates) best = std::max(best, r.stop_gap(horizon));
  return best;
}

double StoppingRaceResult::mean_final_reward_mad() const {
  double sum = 0.0;
  for (const auto& r : replicates) sum += r.mad_reward.back();
  return replicates.empty() ? 0.0 : sum / static_cast<double>(replicates.size());
}

double StoppingRaceResult::mean_final_reward_bernoulli() const {
  double sum = 0.0;
  for (const auto& r : replicates) sum += r.bernoulli_reward.back();
  return replicates.empty() ? 0.0 : sum / static_cast<double>(replicates.size());
}

namespace {

RaceReplicate race_one(const OutcomeModelSpec& outcome, const Design& mad_design, const PolicyConfig& policy,
                       std::size_t horizon, std::uint64_t seed, std::size_t replicate, double alpha, double eta) {
  OutcomeModelSpec spec = outcome;
  spec.n_units = horizon;
  const PotentialOutcomeTable table = generate_table(spec, seed);
  const Design bern = Design::bernoulli();
  const Trajectory mad = run_trajectory(table, policy, mad_design, design_seed(seed, mad_design.label));
  const Trajectory bernoulli =
      run_trajectory(table, PolicyConfig{PolicyKind::uniform}, bern, design_seed(seed, bern.label));
  const ArmPair pair{1, 0};

  RaceReplicate r;
  r.replicate = replicate;
  r.table_id = table_fingerprint(table);
  r.mad_stop = stopping_time(cs_track(mad, pair, eta, alpha)).stop_time;
  r.bernoulli_stop = stopping_time(cs_track(bernoulli, pair, eta, alpha)).stop_time;
  r.truncation = r.mad_stop.value_or(horizon);

  // Best arm by IPW arm mean at the Bernoulli stop.
  if (r.bernoulli_stop) {
    std::vector<double> arm_sum(table.n_arms(), 0.0);
    for (std::size_t i = 0; i < *r.bernoulli_stop; ++i) {
      const auto& s = bernoulli.steps[i];
      arm_sum[s.chosen_arm] += s.observed_outcome / s.mixed[s.chosen_arm];
    }
    r.bernoulli_best_arm =
        static_cast<std::size_t>(std::max_element(arm_sum.begin(), arm_sum.end()) - arm_sum.begin());
  }

  std::vector<double> mad_outcomes(r.truncation);
  std::vector<double> bern_outcomes(r.truncation);
  for (std::size_t i = 0; i < r.truncation; ++i) {
    mad_outcomes[i] = mad.steps[i].observed_outcome;
    const bool exploiting = r.bernoulli_stop && i + 1 > *r.bernoulli_stop;
    bern_outcomes[i] = exploiting ? table(i, r.bernoulli_best_arm) : bernoulli.steps[i].observed_outcome;
  }
  r.mad_reward = running_mean(mad_outcomes);
  r.bernoulli_reward = running_mean(bern_outcomes);
  return r;
}

}  // namespace

StoppingRaceResult run_stopping_race(const OutcomeModelSpec& outcome, const Design& mad_design,
                                     const PolicyConfig& policy, std::size_t replicates, std::size_t horizon,
                                     std::uint64_t base_seed, double alpha, double eta, std::size_t jobs) {
  if (outcome.n_arms() != 2) throw ParameterError("outcome.params", "a stopping race needs two arms");
  if (!mad_design.schedule) throw ParameterError("design.schedule", "the MAD design needs a schedule");
  StoppingRaceResult result;
  result.horizon = horizon;
  result.replicates.resize(replicates);
  parallel_for(0, replicates, jobs, [&](std::size_t r) {
    result.replicates[r] = race_one(outcome, mad_design, policy, horizon, base_seed + r, r, alpha, eta);
  });
  return result;
}

ExperimentResult run_preset(const ExperimentPreset& preset, std::uint64_t base_seed, const RunOptions& options) {
  preset.validate();
  const auto started = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.preset = preset.name;
  result.base_seed = base_seed;
  result.horizon = preset.horizon;
  result.replicates = preset.replicates;
  result.eta = preset.resolved_eta();
  const double eta = result.eta;

  if (preset.stopping_race) {
    const Setting& setting = preset.settings.front();
    StoppingRaceResult race = run_stopping_race(setting.outcome, preset.designs[0], preset.policy,
                                                preset.replicates, preset.horizon, base_seed, preset.alpha, eta,
                                                options.jobs);
    CurveAccumulator mad_acc;
    CurveAccumulator bern_acc;
    for (const auto& r : race.replicates) {
      mad_acc.add(r.mad_reward);
      bern_acc.add(r.bernoulli_reward);
    }
    DesignCurves mad_curves;
    mad_curves.setting = setting.label;
    mad_curves.design = preset.designs[0].label;
    mad_curves.metrics.emplace("cumulative_reward", mad_acc.finish());
    DesignCurves bern_curves;
    bern_curves.setting = setting.label;
    bern_curves.design = preset.designs[1].label;
    bern_curves.metrics.emplace("cumulative_reward", bern_acc.finish());
    result.curves.curves.push_back(std::move(mad_curves));
    result.curves.curves.push_back(std::move(bern_curves));
    result.race = std::move(race);
  } else {
    // Slot order: setting, design, treatment arm.
    struct Slot {
      std::size_t setting;
      std::size_t design;
      ArmPair pair;
    };
    std::vector<Slot> slots;
    for (std::size_t s = 0; s < preset.settings.size(); ++s) {
      for (std::size_t d = 0; d < preset.designs.size(); ++d) {
        for (std::size_t w = 0; w < preset.settings[s].outcome.n_arms(); ++w) {
          if (w != preset.control) slots.push_back({s, d, {w, preset.control}});
        }
      }
    }
    std::vector<DesignAccumulator> accumulators(slots.size());

    auto run_replicate = [&](std::size_t r) {
      const std::uint64_t seed = base_seed + r;
      std::vector<ReplicateObservation> out;
      out.reserve(slots.size());
      for (std::size_t s = 0; s < preset.settings.size(); ++s) {
        OutcomeModelSpec spec = preset.settings[s].outcome;
        spec.n_units = preset.horizon;
        const PotentialOutcomeTable table = generate_table(spec, seed);
        for (std::size_t d = 0; d < preset.designs.size(); ++d) {
          const Design& design = preset.designs[d];
          const Trajectory trajectory =
              run_trajectory(table, preset.policy, design, design_seed(seed, design.label), preset.mode);
          for (std::size_t w = 0; w < spec.n_arms(); ++w) {
            if (w == preset.control) continue;
            out.push_back(observe(trajectory, table, {w, preset.control}, eta, preset.alpha,
                                  preset.nonasymptotic, r, design_p_min(design, spec.n_arms(), preset.horizon)));
          }
        }
      }
      return out;
    };

    // Replicates run in parallel blocks; reduction is always in replicate
    // order so results do not depend on the number of jobs.
    const std::size_t jobs = std::max<std::size_t>(options.jobs, 1);
    const std::size_t block = jobs * 2;
    for (std::size_t begin = 0; begin < preset.replicates; begin += block) {
      const std::size_t end = std::min(preset.replicates, begin + block);
      std::vector<std::vector<ReplicateObservation>> pending(end - begin);
      parallel_for(begin, end, jobs, [&](std::size_t r) { pending[r - begin] = run_replicate(r); });
      for (auto& replicate : pending) {
        for (std::size_t k = 0; k < slots.size(); ++k) accumulators[k].add(replicate[k], options.keep_raw);
      }
    }
    for (std::size_t k = 0; k < slots.size(); ++k) {
      result.curves.curves.push_back(std::move(accumulators[k])
                                         .finish(preset.settings[slots[k].setting].label,
                                                 preset.designs[slots[k].design].label));
    }
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

ExperimentResult run_nonstationary(const ExperimentPreset& preset, std::uint64_t base_seed, std::size_t jobs) {
  return run_preset(preset, base_seed, RunOptions{jobs, true});
}

std::string metrics_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "setting,design,contrast,t,metric,mean,se\n";
  for (const auto& c : result.curves.curves) {
    const std::string contrast = std::to_string(c.pair.treatment) + "-" + std::to_string(c.pair.control);
    for (const auto& [name, stat] : c.metrics) {
      for (std::size_t i = 0; i < stat.size(); ++i) {
        out << c.setting << ',' << c.design << ',' << contrast << ',' << (i + 1) << ',' << name << ','
            << format_double(stat.mean[i]) << ',' << format_double(stat.se[i]) << '\n';
      }
    }
  }
  return out.str();
}

std::string raw_tracks_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "setting,design,contrast,replicate,t,center,radius,true_ate\n";
  for (const auto& c : result.curves.curves) {
    const std::string contrast = std::to_string(c.pair.treatment) + "-" + std::to_string(c.pair.control);
    for (const auto& raw : c.raw) {
      for (std::size_t i = 0; i < raw.center.size(); ++i) {
        out << c.setting << ',' << c.design << ',' << contrast << ',' << raw.replicate << ',' << (i + 1) << ','
            << format_double(raw.center[i]) << ',' << format_double(raw.radius[i]) << ','
            << format_double(raw.true_ate[i]) << '\n';
      }
    }
  }
  return out.str();
}

std::string race_csv(const StoppingRaceResult& race) {
  std::ostringstream out;
  out << "replicate,mad_stop,bernoulli_stop,gap,truncation,best_arm,mad_reward,bernoulli_reward\n";
  auto stop_text = [](const std::optional<std::size_t>& s) { return s ? std::to_string(*s) : std::string("NA"); };
  for (const auto& r : race.replicates) {
    out << r.replicate << ',' << stop_text(r.mad_stop) << ',' << stop_text(r.bernoulli_stop) << ','
        << r.stop_gap(race.horizon) << ',' << r.truncation << ',' << r.bernoulli_best_arm << ','
        << format_double(r.mad_reward.back()) << ',' << format_double(r.bernoulli_reward.back()) << '\n';
  }
  return out.str();
}

}  // namespace mad
