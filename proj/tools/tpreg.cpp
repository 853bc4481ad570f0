#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tpreg/errors.hpp"
#include "tpreg/pipeline/run.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string transform;
  std::string levels;
};

int report_error(const std::string& mode, int code, const std::string& message) {
  const nlohmann::json j = {{"status", "error"}, {"mode", mode}, {"kind", "config_error"},
                            {"exit_code", code}, {"message", message}};
  std::cout << j.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace tpreg::pipeline;

  CLI::App app{"Telehealth parity-law equilibrium and PPML estimation pipeline"};
  app.require_subcommand(1);

  Flags flags;
  const char* const names[][2] = {
      {"simulate-equilibrium", "Solve the supply-chain equilibrium over a (regime, broadband) grid"},
      {"generate-panel", "Simulate a county-year panel from the data-generating process"},
      {"fit", "Fit the interaction PPML model to a panel CSV"},
      {"analyze", "ATT table, event study, placebo and RESET diagnostics for a panel"},
      {"ingest-broadband", "Weight and transform broadband records; optionally assemble a panel"},
      {"montecarlo", "Run a replicated simulation study"}};
  for (const auto& [name, help] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "Override the random seed");
    sub->add_option("--out", flags.out, "Output directory")->capture_default_str();
    sub->add_option("--transform", flags.transform, "Broadband transform")
        ->check(CLI::IsMember({"zscore", "log_minmax", "arcsinh"}));
    sub->add_option("--levels", flags.levels, "Broadband levels for the ATT table, e.g. 0,1,2,4,8,12");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("cli", 2, e.what());
  }

  const std::string mode = app.get_subcommands().front()->get_name();
  RunConfig config;
  try {
    config.mode = parse_mode(mode);
    load_config_file(config, flags.config);
    config.out_dir = flags.out;
    config.seed = flags.seed;
    if (!flags.transform.empty()) config.transform = parse_transform(flags.transform);
    if (!flags.levels.empty()) config.levels = parse_levels(flags.levels);
  } catch (const tpreg::ConfigError& e) {
    return report_error(mode, 2, e.what());
  }
  return run(config, std::cout).exit_code;
}
