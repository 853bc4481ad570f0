#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpreg/equilibrium/primitives.hpp"

namespace tpreg::equilibrium {

struct SolverOptions {
  double lower = 1e-8;  // search interval for the telehealth input
  double upper = 1e8;
  double log_tolerance = 1e-12;  // bisection width in ln T
  int max_bisections = 200;
  int newton_steps = 3;
  int scan_points = 400;  // bracketing grid for non-monotone residuals
  double residual_tolerance = 1e-9;
};

/// Relative residual of every equilibrium condition at a candidate state.
struct ConditionResiduals {
  double full_price = 0.0;         // FP
  double final_demand = 0.0;       // FD
  double production = 0.0;         // PF
  double inperson_supply = 0.0;    // IS
  double telehealth_supply = 0.0;  // TS
  double cost_minimization = 0.0;  // CMC
  double price_compliance = 0.0;   // PRC

  /// FP, PF, IS, TS and CMC: the producer side of the unregulated system.
  double max_unregulated_supply() const;
  /// FP, PF, IS, TS and PRC.
  double max_regulated_supply() const;

  std::vector<std::pair<std::string, double>> named() const;
};

/// Residuals at `state`; demand is evaluated under cost-control intensity
/// `gamma`, compliance against `rho` (ignored when rho <= 0).
ConditionResiduals condition_residuals(const MarketPrimitives& primitives,
                                       const Equilibrium& state, double gamma,
                                       double rho);

/// The point on the cost-minimizing supply curve with the given telehealth
/// input. I follows in closed form from the MRTS condition.
Equilibrium cost_minimizing_supply_point(const MarketPrimitives& primitives,
                                         double telehealth_input);

/// The point on the compliance-constrained supply curve r_T T / Y = rho with
/// the given telehealth input, or nullopt when no positive in-person input
/// reaches the implied output.
std::optional<Equilibrium> compliant_supply_point(const MarketPrimitives& primitives,
                                                  double rho, double telehealth_input);

/// Market clearing along the cost-minimizing supply curve, demand rotated by
/// `gamma`.
Equilibrium solve_cost_minimizing(const MarketPrimitives& primitives, double gamma,
                                  const SolverOptions& options = {});

/// Unregulated equilibrium: cost minimization and unrotated demand.
Equilibrium solve_unregulated(const MarketPrimitives& primitives,
                              const SolverOptions& options = {});

/// Market clearing with the compliance condition imposed regardless of
/// whether it binds.
Equilibrium solve_price_constrained(const MarketPrimitives& primitives, double rho,
                                    double gamma, const SolverOptions& options = {});

/// Equilibrium under `regime`. A price control replaces cost minimization
/// only when it binds against the cost-minimizing outcome; cost controls
/// rotate demand through gamma.
Equilibrium solve_regulated(const MarketPrimitives& primitives, const PolicyRegime& regime,
                            const SolverOptions& options = {});

/// E(rho): the point on the cost-minimizing supply curve whose per-unit
/// telehealth revenue equals rho. Not a market-clearing point.
Equilibrium supply_point_at_unit_revenue(const MarketPrimitives& primitives, double rho,
                                         const SolverOptions& options = {});

}  // namespace tpreg::equilibrium
