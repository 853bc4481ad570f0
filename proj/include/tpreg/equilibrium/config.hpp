#pragma once

#include <json.hpp>

#include "tpreg/equilibrium/comparative.hpp"
#include "tpreg/equilibrium/primitives.hpp"
#include "tpreg/equilibrium/solver.hpp"

namespace tpreg::equilibrium {

// JSON loaders. Missing keys keep their defaults; unknown keys and values
// that break a type's invariants raise ConfigError.
//
// {
//   "primitives": {
//     "telehealth_supply": {"elasticity": 2, "scale": 1},
//     "inperson_supply":   {"elasticity": 1, "scale": 1},
//     "production": {"tfp": 1, "share": 0.5, "substitution": 0.8},
//     "demand": {"eta0": 0.5, "eta1": 0.01, "eta2": 0.05, "demand_shift": 1, ...}
//   },
//   "regimes": [{"price": "floor", "rho": 0.6}, {"cost": "parity"}],
//   "broadband_grid": [0, 1, 2, 4, 8, 12],
//   "broadband_link": {"telehealth_elasticity_gain": 0},
//   "solver": {"lower": 1e-8, "upper": 1e8, ...}
// }

MarketPrimitives primitives_from_json(const nlohmann::json& j);
PolicyRegime regime_from_json(const nlohmann::json& j);
SolverOptions solver_options_from_json(const nlohmann::json& j);
BroadbandLink broadband_link_from_json(const nlohmann::json& j);

/// Reads "primitives", "regimes", "broadband_grid" and "broadband_link".
SweepSpec sweep_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Equilibrium& e);
nlohmann::json to_json(const ConditionResiduals& r);

}  // namespace tpreg::equilibrium
