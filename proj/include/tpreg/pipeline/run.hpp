#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpreg/pipeline/broadband.hpp"

namespace tpreg::pipeline {

enum class Mode { simulate, generate, fit, analyze, ingest, montecarlo };

/// Accepts both the mode names and the CLI subcommand names
/// (simulate-equilibrium, generate-panel, ingest-broadband, ...).
Mode parse_mode(const std::string& name);
std::string mode_name(Mode m);

struct RunConfig {
  Mode mode = Mode::simulate;
  /// Mode-specific parameters; see the README for each mode's keys.
  nlohmann::json params = nlohmann::json::object();
  /// Directory that relative input paths in `params` are resolved against.
  std::string base_dir = ".";
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<Transform> transform;
  std::optional<std::vector<double>> levels;
};

/// Reads the JSON file at `path` into params and sets base_dir to its
/// directory. ConfigError when the file is missing or not valid JSON.
void load_config_file(RunConfig& config, const std::string& path);

/// "0,1,2.5" -> {0, 1, 2.5}; ConfigError on malformed input.
std::vector<double> parse_levels(const std::string& text);

struct RunResult {
  int exit_code = 0;
  nlohmann::json summary;  // printed as one JSON line
};

/// Exit codes: 0 success, 2 configuration error, 3 convergence failure
/// (including root bracketing and infeasible regimes), 4 data or domain
/// error, 1 anything else.
int exit_code_for(const std::exception& e);

/// Executes the mode, writes its files into out_dir atomically and prints
/// the summary line to `summary_out`. Never throws; failures come back as a
/// nonzero exit code with {"status": "error", ...} as the summary.
RunResult run(const RunConfig& config, std::ostream& summary_out);

}  // namespace tpreg::pipeline
