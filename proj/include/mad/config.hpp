#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mad/harness.hpp"

namespace mad {

// An experiment plus the run-level settings of a CLI invocation.
struct RunConfig {
  ExperimentPreset preset;
  std::uint64_t base_seed = 0;
  std::optional<std::string> out_dir;
  bool raw = false;
  std::size_t jobs = 1;

  void validate() const;
};

// Command-line overrides; each one is equivalent to editing the matching
// config field.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> horizon;
  std::optional<std::string> out;
  std::optional<bool> raw;
  std::optional<std::size_t> jobs;
  std::optional<double> alpha;
  std::optional<double> eta;
  std::optional<std::uint64_t> t_star;
};

nlohmann::json preset_to_json(const ExperimentPreset& preset);
nlohmann::json config_to_json(const RunConfig& config);

// Parses a config tree. A "preset" key names a catalog preset used as the base
// that the remaining keys patch. Errors are ParameterError with a field path
// such as "designs[0].schedule.a".
RunConfig config_from_json(const nlohmann::json& tree);
RunConfig load_config(const std::filesystem::path& path);

void apply_overrides(RunConfig& config, const Overrides& overrides);

// Output directory: explicit setting, else $MAD_OUT, else "results".
std::filesystem::path resolve_out_dir(const RunConfig& config);

nlohmann::json run_manifest(const RunConfig& config, const ExperimentResult& result,
                            const std::vector<std::string>& outputs);

// Entry point shared by the mad executable and the tests. Exit codes: 0 ok,
// 1 runtime failure, 2 invalid configuration or usage.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mad
