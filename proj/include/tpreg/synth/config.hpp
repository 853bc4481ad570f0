#pragma once

#include <json.hpp>

#include "tpreg/synth/dgp.hpp"

namespace tpreg::synth {

// {
//   "panel": {"n_states": 50, "counties_per_state": 20, "first_year": 2010,
//             "last_year": 2019, "cohort_years": [2012, ...],
//             "never_treated_fraction": 0.5, "type_names": ["price_floor"],
//             "type_assignment": {"3": 0}, "untyped_fraction": 0,
//             "broadband": {"trend": 0.1, "county_sd": 1, "county_trend_sd": 0.05,
//                           "noise_sd": 0.2, "levels": []},
//             "controls": [{"name": "income", "log_mean": 10, "log_sd": 0.3}],
//             "county_effect_mean": 3, "county_effect_sd": 0.5, "year_effect_sd": 0.1,
//             "metro_fraction": 0.4, "overdispersion_shape": 0,
//             "treated_trend": 0, "quadratic": 0, "seed": 1, "replicate": 0},
//   "truth": {"beta1": [0.03], "beta2": [-0.006], "beta3": [0], "beta4": 0,
//             "beta_broadband": 0, "beta5": [0.1]}
// }
// Unlisted vectors in "truth" default to zeros of the right length.

PanelConfig panel_config_from_json(const nlohmann::json& j);
TrueParameters true_parameters_from_json(const nlohmann::json& j, const PanelConfig& config);

}  // namespace tpreg::synth
