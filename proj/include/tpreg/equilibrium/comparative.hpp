#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tpreg/equilibrium/primitives.hpp"
#include "tpreg/equilibrium/solver.hpp"

namespace tpreg::equilibrium {

/// Y under `regime` minus the unregulated Y.
double equilibrium_shift(const MarketPrimitives& primitives, const PolicyRegime& regime,
                         const SolverOptions& options = {});

/// Productivity shock dA scales tfp by (1 + dA); demand shock dB scales
/// demand_shift by (1 + dB).
MarketPrimitives apply_shocks(const MarketPrimitives& primitives, double productivity_shock,
                              double demand_shock);

/// Central-difference supply elasticity d ln Y / d ln P at the regime's
/// equilibrium, obtained by moving demand_shift by a factor (1 +/- bump) and
/// re-solving. With a price control the compliance condition is imposed at
/// every point, i.e. the estimate follows the regulated supply curve.
double local_supply_elasticity(const MarketPrimitives& primitives, const PolicyRegime& regime,
                               double bump, const SolverOptions& options = {});

/// How broadband moves the primitives: sets the demand-side broadband level
/// and scales the telehealth supply elasticity by exp(gain * B).
struct BroadbandLink {
  double telehealth_elasticity_gain = 0.0;

  MarketPrimitives at(const MarketPrimitives& base, double broadband_z) const;
};

struct SweepRow {
  std::string regime;
  double broadband_z = 0.0;
  double y_unreg = 0.0;
  double y_reg = 0.0;
  double shift = 0.0;
  double eta_unreg = 0.0;
  double eta_reg = 0.0;
  double diff_direct = 0.0;
  double diff_factorized = 0.0;
  bool sign_ok = false;
};

struct SweepSpec {
  MarketPrimitives base;
  BroadbandLink link;
  std::vector<PolicyRegime> regimes;
  std::vector<double> broadband_grid;
};

/// Solves every (regime, broadband) pair. Elasticity columns are evaluated at
/// the unregulated cost shares; when sigma * s_I >= 1 the difference columns
/// are NaN and sign_ok is false.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SolverOptions& options = {});

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace tpreg::equilibrium
