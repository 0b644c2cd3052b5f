#include "mad/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "mad/error.hpp"
#include "mad/presets.hpp"

namespace mad {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string key_path(const std::string& prefix, const std::string& key) { return prefix + key; }

const json* member(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double get_number(const json& obj, const std::string& key, const std::string& prefix, double fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) throw ParameterError(key_path(prefix, key), "expected a number");
  return v->get<double>();
}

std::uint64_t get_count(const json& obj, const std::string& key, const std::string& prefix, std::uint64_t fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (v->is_number_integer() && v->get<long long>() >= 0) return v->get<std::uint64_t>();
  if (v->is_number_integer()) throw ParameterError(key_path(prefix, key), "must be non-negative");
  throw ParameterError(key_path(prefix, key), "expected an integer");
}

bool get_bool(const json& obj, const std::string& key, const std::string& prefix, bool fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ParameterError(key_path(prefix, key), "expected true or false");
  return v->get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& prefix,
                       const std::string& fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) throw ParameterError(key_path(prefix, key), "expected a string");
  return v->get<std::string>();
}

const json& require_object(const json& obj, const std::string& key, const std::string& prefix) {
  const json* v = member(obj, key);
  if (!v) throw ParameterError(key_path(prefix, key), "is required");
  if (!v->is_object()) throw ParameterError(key_path(prefix, key), "expected an object");
  return *v;
}

template <typename Fn>
auto with_prefix(const std::string& prefix, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ParameterError& e) {
    throw e.nested(prefix);
  }
}

std::vector<double> get_params(const json& obj, const std::string& prefix) {
  const json* v = member(obj, "params");
  if (!v) throw ParameterError(prefix + "params", "is required");
  if (!v->is_array()) throw ParameterError(prefix + "params", "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number()) throw ParameterError(prefix + "params[" + std::to_string(i) + "]", "expected a number");
    out.push_back((*v)[i].get<double>());
  }
  return out;
}

json arm_parameters_to_json(const ArmParameters& p, OutcomeKind kind) {
  json j;
  j["params"] = p.location;
  if (kind != OutcomeKind::bernoulli) j["scale"] = p.scale;
  if (kind == OutcomeKind::student_t) j["df"] = p.df;
  return j;
}

json outcome_to_json(const OutcomeModelSpec& spec) {
  json j = arm_parameters_to_json(spec.base, spec.kind);
  j["kind"] = std::string(to_string(spec.kind));
  if (!spec.changepoints.empty()) {
    json cps = json::array();
    for (const auto& cp : spec.changepoints) {
      json c = arm_parameters_to_json(cp.parameters, spec.kind);
      c["start"] = cp.start_unit;
      cps.push_back(c);
    }
    j["changepoints"] = cps;
  }
  return j;
}

OutcomeModelSpec outcome_from_json(const json& j, const std::string& prefix) {
  OutcomeModelSpec spec;
  spec.kind = with_prefix(prefix, [&] { return outcome_kind_from_string(get_string(j, "kind", prefix, "bernoulli")); });
  spec.base.location = get_params(j, prefix);
  spec.base.scale = get_number(j, "scale", prefix, 1.0);
  spec.base.df = get_number(j, "df", prefix, 1.0);
  if (const json* cps = member(j, "changepoints")) {
    if (!cps->is_array()) throw ParameterError(prefix + "changepoints", "expected an array");
    for (std::size_t i = 0; i < cps->size(); ++i) {
      const std::string cp_prefix = prefix + "changepoints[" + std::to_string(i) + "].";
      const json& c = (*cps)[i];
      if (!c.is_object()) throw ParameterError(cp_prefix.substr(0, cp_prefix.size() - 1), "expected an object");
      Changepoint cp;
      cp.start_unit = get_count(c, "start", cp_prefix, 0);
      cp.parameters.location = get_params(c, cp_prefix);
      cp.parameters.scale = get_number(c, "scale", cp_prefix, spec.base.scale);
      cp.parameters.df = get_number(c, "df", cp_prefix, spec.base.df);
      spec.changepoints.push_back(std::move(cp));
    }
  }
  return spec;
}

json schedule_to_json(const DeltaSchedule& s) {
  json j;
  j["kind"] = std::string(to_string(s.kind));
  if (s.kind != DeltaSchedule::Kind::constant) j["a"] = s.a;
  if (s.kind != DeltaSchedule::Kind::power) j["c"] = s.c;
  return j;
}

DeltaSchedule schedule_from_json(const json& j, const std::string& prefix) {
  DeltaSchedule s;
  s.kind = with_prefix(prefix, [&] { return schedule_kind_from_string(get_string(j, "kind", prefix, "power")); });
  s.a = get_number(j, "a", prefix, 0.0);
  s.c = get_number(j, "c", prefix, 1.0);
  with_prefix(prefix, [&] { s.validate(); });
  return s;
}

ExperimentPreset preset_from_json(const json& j) {
  ExperimentPreset p;
  p.name = get_string(j, "name", "", "custom");
  p.description = get_string(j, "description", "", "");
  p.group = get_string(j, "group", "", "");

  if (const json* settings = member(j, "settings")) {
    if (!settings->is_array()) throw ParameterError("settings", "expected an array");
    for (std::size_t i = 0; i < settings->size(); ++i) {
      const std::string prefix = "settings[" + std::to_string(i) + "].";
      const json& s = (*settings)[i];
      if (!s.is_object()) throw ParameterError("settings[" + std::to_string(i) + "]", "expected an object");
      p.settings.push_back({get_string(s, "label", prefix, "setting_" + std::to_string(i)),
                            outcome_from_json(require_object(s, "outcome", prefix), prefix + "outcome.")});
    }
  } else if (member(j, "outcome")) {
    p.settings.push_back({"default", outcome_from_json(require_object(j, "outcome", ""), "outcome.")});
  }

  if (const json* policy = member(j, "policy")) {
    if (!policy->is_object()) throw ParameterError("policy", "expected an object");
    p.policy.kind = with_prefix("policy.", [&] {
      return policy_kind_from_string(get_string(*policy, "kind", "policy.", "thompson_beta"));
    });
    p.policy.mc_draws = get_count(*policy, "mc_draws", "policy.", 1000);
    p.policy.force_monte_carlo = get_bool(*policy, "force_monte_carlo", "policy.", false);
  }

  if (const json* designs = member(j, "designs")) {
    if (!designs->is_array()) throw ParameterError("designs", "expected an array");
    for (std::size_t i = 0; i < designs->size(); ++i) {
      const std::string prefix = "designs[" + std::to_string(i) + "].";
      const json& d = (*designs)[i];
      if (!d.is_object()) throw ParameterError("designs[" + std::to_string(i) + "]", "expected an object");
      Design design;
      design.label = get_string(d, "label", prefix, "");
      if (const json* s = member(d, "schedule")) {
        if (!s->is_object()) throw ParameterError(prefix + "schedule", "expected an object or null");
        design.schedule = schedule_from_json(*s, prefix + "schedule.");
      }
      p.designs.push_back(std::move(design));
    }
  }

  p.horizon = get_count(j, "horizon", "", p.horizon);
  p.replicates = get_count(j, "replicates", "", p.replicates);
  p.alpha = get_number(j, "alpha", "", p.alpha);
  if (member(j, "eta")) p.eta = get_number(j, "eta", "", 0.0);
  p.t_star = get_count(j, "t_star", "", p.t_star);
  if (const json* mode = member(j, "mode")) {
    if (!mode->is_object()) throw ParameterError("mode", "expected an object");
    const std::string kind = get_string(*mode, "kind", "mode.", "per_unit");
    if (kind == "per_unit") {
      p.mode = AssignmentMode::per_unit();
    } else if (kind == "batched") {
      p.mode = AssignmentMode::batched(get_count(*mode, "batch_size", "mode.", 0));
      if (p.mode.batch_size == 0) throw ParameterError("mode.batch_size", "must be >= 1");
    } else {
      throw ParameterError("mode.kind", "expected 'per_unit' or 'batched'");
    }
  }
  p.control = get_count(j, "control", "", 0);
  if (const json* na = member(j, "nonasymptotic")) {
    if (!na->is_object()) throw ParameterError("nonasymptotic", "expected an object");
    p.nonasymptotic.enabled = get_bool(*na, "enabled", "nonasymptotic.", true);
    if (member(*na, "rho")) p.nonasymptotic.rho = get_number(*na, "rho", "nonasymptotic.", 1.0);
    p.nonasymptotic.target_intrinsic_time = get_number(*na, "target", "nonasymptotic.", 1e4);
    p.nonasymptotic.boundary = with_prefix("nonasymptotic.", [&] {
      return boundary_kind_from_string(get_string(*na, "boundary", "nonasymptotic.", "normal_mixture"));
    });
    p.nonasymptotic.outcome_bound = get_number(*na, "outcome_bound", "nonasymptotic.", 1.0);
  }
  p.stopping_race = get_bool(j, "stopping_race", "", false);
  p.misspecified = get_bool(j, "misspecified", "", false);
  return p;
}

}  // namespace

void RunConfig::validate() const {
  if (jobs < 1) throw ParameterError("jobs", "must be >= 1");
  preset.validate();
}

json preset_to_json(const ExperimentPreset& p) {
  json j;
  j["name"] = p.name;
  j["description"] = p.description;
  j["group"] = p.group;
  j["settings"] = json::array();
  for (const auto& s : p.settings) j["settings"].push_back({{"label", s.label}, {"outcome", outcome_to_json(s.outcome)}});
  j["policy"] = {{"kind", std::string(to_string(p.policy.kind))},
                 {"mc_draws", p.policy.mc_draws},
                 {"force_monte_carlo", p.policy.force_monte_carlo}};
  j["designs"] = json::array();
  for (const auto& d : p.designs) {
    j["designs"].push_back({{"label", d.label}, {"schedule", d.schedule ? schedule_to_json(*d.schedule) : json(nullptr)}});
  }
  j["horizon"] = p.horizon;
  j["replicates"] = p.replicates;
  j["alpha"] = p.alpha;
  j["eta"] = p.eta ? json(*p.eta) : json(nullptr);
  j["t_star"] = p.t_star;
  j["mode"] = p.mode.is_batched() ? json{{"kind", "batched"}, {"batch_size", p.mode.batch_size}}
                                  : json{{"kind", "per_unit"}};
  j["control"] = p.control;
  if (p.nonasymptotic.enabled) {
    j["nonasymptotic"] = {{"enabled", true},
                          {"rho", p.nonasymptotic.rho ? json(*p.nonasymptotic.rho) : json(nullptr)},
                          {"target", p.nonasymptotic.target_intrinsic_time},
                          {"boundary", std::string(to_string(p.nonasymptotic.boundary))},
                          {"outcome_bound", p.nonasymptotic.outcome_bound}};
  }
  j["stopping_race"] = p.stopping_race;
  j["misspecified"] = p.misspecified;
  return j;
}

json config_to_json(const RunConfig& config) {
  json j = preset_to_json(config.preset);
  j["seed"] = config.base_seed;
  if (config.out_dir) j["out"] = *config.out_dir;
  j["raw"] = config.raw;
  j["jobs"] = config.jobs;
  return j;
}

RunConfig config_from_json(const json& tree) {
  if (!tree.is_object()) throw ParameterError("config", "top level must be an object");
  json merged = tree;
  if (const json* base = member(tree, "preset")) {
    if (!base->is_string()) throw ParameterError("preset", "expected a preset name");
    const auto preset = find_preset(base->get<std::string>());
    if (!preset) throw ParameterError("preset", "unknown preset '" + base->get<std::string>() + "'");
    merged = preset_to_json(*preset);
    json patch = tree;
    patch.erase("preset");
    merged.merge_patch(patch);
  }
  RunConfig config;
  config.preset = preset_from_json(merged);
  config.base_seed = get_count(merged, "seed", "", 0);
  if (member(merged, "out")) config.out_dir = get_string(merged, "out", "", "");
  config.raw = get_bool(merged, "raw", "", false);
  config.jobs = get_count(merged, "jobs", "", 1);
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("config", "cannot open '" + path.string() + "'");
  json tree;
  try {
    tree = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError("config", std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(tree);
}

void apply_overrides(RunConfig& config, const Overrides& o) {
  if (o.seed) config.base_seed = *o.seed;
  if (o.replicates) config.preset.replicates = *o.replicates;
  if (o.horizon) config.preset.horizon = *o.horizon;
  if (o.out) config.out_dir = *o.out;
  if (o.raw) config.raw = *o.raw;
  if (o.jobs) config.jobs = *o.jobs;
  if (o.alpha) config.preset.alpha = *o.alpha;
  if (o.eta) config.preset.eta = *o.eta;
  if (o.t_star) {
    config.preset.t_star = *o.t_star;
    if (!o.eta) config.preset.eta.reset();
  }
}

std::filesystem::path resolve_out_dir(const RunConfig& config) {
  if (config.out_dir && !config.out_dir->empty()) return *config.out_dir;
  if (const char* env = std::getenv("MAD_OUT"); env && *env) return env;
  return "results";
}

json run_manifest(const RunConfig& config, const ExperimentResult& result, const std::vector<std::string>& outputs) {
  json seeds = json::array();
  for (std::size_t r = 0; r < result.replicates; ++r) seeds.push_back(result.base_seed + r);
  json m;
  m["preset"] = result.preset;
  m["config"] = config_to_json(config);
  m["base_seed"] = result.base_seed;
  m["replicate_seeds"] = seeds;
  m["eta"] = result.eta;
  m["versions"] = {{"mad", kVersion}, {"metrics_schema", kMetricsSchemaVersion}};
  m["metrics_columns"] = {"setting", "design", "contrast", "t", "metric", "mean", "se"};
  m["wall_seconds"] = result.wall_seconds;
  m["outputs"] = outputs;
  return m;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << contents;
  if (!f) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string preset_names() {
  std::string names;
  for (const auto& p : preset_catalog()) names += (names.empty() ? "" : ", ") + p.name;
  return names;
}

void print_summary(const RunConfig& config, const ExperimentResult& result, std::ostream& out) {
  if (result.race) {
    const auto& race = *result.race;
    out << config.preset.name << ": median stop gap (MAD - Bernoulli) " << race.median_gap()
        << ", max Bernoulli lead " << race.max_bernoulli_lead() << ", mean reward MAD "
        << race.mean_final_reward_mad() << " vs Bernoulli " << race.mean_final_reward_bernoulli() << '\n';
    return;
  }
  for (const auto& c : result.curves.curves) {
    const auto& coverage = c.metric("coverage");
    if (coverage.size() == 0) continue;
    const std::size_t t = coverage.size();
    out << c.setting << " / " << c.design << " [" << c.pair.treatment << "-" << c.pair.control << "]"
        << ": coverage " << coverage.mean_at(t) << ", stopped " << c.metric("stopped").mean_at(t) << ", reward "
        << c.metric("reward").mean_at(t) << ", width " << c.metric("width").mean_at(t) << '\n';
  }
}

int cmd_run(RunConfig config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
  try {
    const std::filesystem::path dir = resolve_out_dir(config);
    std::filesystem::create_directories(dir);
    const ExperimentResult result =
        run_preset(config.preset, config.base_seed, RunOptions{config.jobs, config.raw});
    const std::string stem = config.preset.name;
    std::vector<std::string> outputs;
    auto emit = [&](const std::string& suffix, const std::string& contents) {
      const auto path = dir / (stem + suffix);
      write_file(path, contents);
      outputs.push_back(path.filename().string());
    };
    emit("_metrics.csv", metrics_csv(result));
    if (config.raw && !result.race) emit("_raw.csv", raw_tracks_csv(result));
    if (result.race) emit("_race.csv", race_csv(*result.race));
    outputs.push_back(stem + "_manifest.json");
    write_file(dir / (stem + "_manifest.json"), run_manifest(config, result, outputs).dump(2) + "\n");
    print_summary(config, result, out);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixture adaptive design: anytime-valid ATE inference on bandit experiments", "mad"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* run = app.add_subcommand("run", "Run a preset or config and write metrics CSVs");
  std::string preset_name;
  std::string config_path;
  Overrides overrides;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  std::size_t horizon = 0;
  std::string out_dir;
  std::size_t jobs = 0;
  double alpha = 0.0;
  double eta = 0.0;
  std::uint64_t t_star = 0;
  bool raw = false;
  run->add_option("--preset", preset_name, "Catalog preset name");
  run->add_option("--config", config_path, "JSON config file");
  auto* seed_opt = run->add_option("--seed", seed, "Base seed; replicate r uses seed + r");
  auto* rep_opt = run->add_option("--replicates", replicates, "Number of replicates");
  auto* hor_opt = run->add_option("--horizon", horizon, "Units per replicate");
  auto* out_opt = run->add_option("--out", out_dir, "Output directory (default $MAD_OUT or ./results)");
  auto* raw_opt = run->add_flag("--raw", raw, "Also write per-replicate tracks");
  auto* jobs_opt = run->add_option("--jobs", jobs, "Worker threads");
  auto* alpha_opt = run->add_option("--alpha", alpha, "Miscoverage level");
  auto* eta_opt = run->add_option("--eta", eta, "Confidence sequence tuning parameter");
  auto* tstar_opt = run->add_option("--t-star", t_star, "Time at which eta optimizes the width");

  auto* list = app.add_subcommand("list-presets", "List catalog presets");
  std::string filter;
  list->add_option("filter", filter, "Only presets whose name contains this text");

  auto* validate = app.add_subcommand("validate", "Validate a config file");
  std::string validate_path;
  validate->add_option("config", validate_path, "JSON config file")->required();

  auto* show = app.add_subcommand("show-preset", "Print a preset as a JSON config");
  std::string show_name;
  show->add_option("name", show_name, "Preset name")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return 2;
  }

  if (*list) {
    for (const auto& p : preset_catalog()) {
      if (!filter.empty() && p.name.find(filter) == std::string::npos) continue;
      out << p.name << "  " << p.description << "  [" << p.group << "]\n";
    }
    return 0;
  }

  if (*show) {
    const auto p = find_preset(show_name);
    if (!p) {
      err << "unknown preset '" << show_name << "'; valid presets: " << preset_names() << '\n';
      return 2;
    }
    out << preset_to_json(*p).dump(2) << '\n';
    return 0;
  }

  if (*validate) {
    try {
      if (!std::filesystem::exists(validate_path)) {
        err << "config error: file '" << validate_path << "' does not exist\n";
        return 2;
      }
      load_config(validate_path).validate();
    } catch (const ParameterError& e) {
      err << "config error: " << e.what() << '\n';
      return 2;
    }
    out << "ok\n";
    return 0;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) {
      config = load_config(config_path);
    } else if (!preset_name.empty()) {
      const auto p = find_preset(preset_name);
      if (!p) {
        err << "unknown preset '" << preset_name << "'; valid presets: " << preset_names() << '\n';
        return 2;
      }
      config.preset = *p;
      config.jobs = std::max(1u, std::thread::hardware_concurrency());
    } else {
      err << "run needs --preset or --config\n";
      return 2;
    }
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
  if (*seed_opt) overrides.seed = seed;
  if (*rep_opt) overrides.replicates = replicates;
  if (*hor_opt) overrides.horizon = horizon;
  if (*out_opt) overrides.out = out_dir;
  if (*raw_opt) overrides.raw = raw;
  if (*jobs_opt) overrides.jobs = jobs;
  if (*alpha_opt) overrides.alpha = alpha;
  if (*eta_opt) overrides.eta = eta;
  if (*tstar_opt) overrides.t_star = t_star;
  apply_overrides(config, overrides);
  return cmd_run(std::move(config), out, err);
}

}  // namespace mad
