#include "tpreg/synth/config.hpp"

#include <string>

#include "tpreg/json_util.hpp"

namespace tpreg::synth {

using nlohmann::json;
using json_util::read;
using json_util::reject_unknown;

PanelConfig panel_config_from_json(const json& j) {
  reject_unknown(j, "panel",
                 {"n_states", "counties_per_state", "first_year", "last_year", "cohort_years",
                  "never_treated_fraction", "type_names", "type_assignment", "untyped_fraction",
                  "broadband", "controls", "county_effect_mean", "county_effect_sd",
                  "year_effect_sd", "metro_fraction", "overdispersion_shape", "treated_trend",
                  "quadratic", "seed", "replicate"});
  PanelConfig c;
  read(j, "n_states", c.n_states, "panel");
  read(j, "counties_per_state", c.counties_per_state, "panel");
  read(j, "first_year", c.first_year, "panel");
  read(j, "last_year", c.last_year, "panel");
  read(j, "cohort_years", c.cohort_years, "panel");
  read(j, "never_treated_fraction", c.never_treated_fraction, "panel");
  read(j, "type_names", c.type_names, "panel");
  read(j, "untyped_fraction", c.untyped_fraction, "panel");
  read(j, "county_effect_mean", c.county_effect_mean, "panel");
  read(j, "county_effect_sd", c.county_effect_sd, "panel");
  read(j, "year_effect_sd", c.year_effect_sd, "panel");
  read(j, "metro_fraction", c.metro_fraction, "panel");
  read(j, "overdispersion_shape", c.overdispersion_shape, "panel");
  read(j, "treated_trend", c.treated_trend, "panel");
  read(j, "quadratic", c.quadratic, "panel");
  read(j, "seed", c.seed, "panel");
  read(j, "replicate", c.replicate, "panel");

  if (j.contains("type_assignment")) {
    json_util::require_object(j["type_assignment"], "panel.type_assignment");
    for (const auto& item : j["type_assignment"].items()) {
      int state = 0;
      try {
        state = std::stoi(item.key());
      } catch (const std::exception&) {
        throw ConfigError("panel.type_assignment: state key \"" + item.key() + "\" is not an integer");
      }
      if (!item.value().is_number_integer()) {
        throw ConfigError("panel.type_assignment: type index must be an integer");
      }
      c.type_assignment[state] = item.value().get<int>();
    }
  }
  if (j.contains("broadband")) {
    const json& b = j["broadband"];
    reject_unknown(b, "panel.broadband", {"trend", "county_sd", "county_trend_sd", "noise_sd", "levels"});
    read(b, "trend", c.broadband.trend, "panel.broadband");
    read(b, "county_sd", c.broadband.county_sd, "panel.broadband");
    read(b, "county_trend_sd", c.broadband.county_trend_sd, "panel.broadband");
    read(b, "noise_sd", c.broadband.noise_sd, "panel.broadband");
    read(b, "levels", c.broadband.levels, "panel.broadband");
  }
  if (j.contains("controls")) {
    if (!j["controls"].is_array()) throw ConfigError("panel.controls: expected an array");
    for (const json& x : j["controls"]) {
      reject_unknown(x, "panel.controls[]", {"name", "log_mean", "log_sd"});
      ControlProcess p;
      read(x, "name", p.name, "panel.controls[]");
      read(x, "log_mean", p.log_mean, "panel.controls[]");
      read(x, "log_sd", p.log_sd, "panel.controls[]");
      c.controls.push_back(p);
    }
  }
  c.validate();
  return c;
}

TrueParameters true_parameters_from_json(const json& j, const PanelConfig& config) {
  reject_unknown(j, "truth", {"beta1", "beta2", "beta3", "beta4", "beta_broadband", "beta5"});
  const std::size_t k = config.type_names.size();
  TrueParameters p;
  p.beta1.assign(k, 0.0);
  p.beta2.assign(k, 0.0);
  p.beta3.assign(k, 0.0);
  p.beta5.assign(config.controls.size(), 0.0);
  read(j, "beta1", p.beta1, "truth");
  read(j, "beta2", p.beta2, "truth");
  read(j, "beta3", p.beta3, "truth");
  read(j, "beta4", p.beta4, "truth");
  read(j, "beta_broadband", p.beta_broadband, "truth");
  read(j, "beta5", p.beta5, "truth");
  p.validate(k, config.controls.size());
  return p;
}

}  // namespace tpreg::synth
