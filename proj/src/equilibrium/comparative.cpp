#include "tpreg/equilibrium/comparative.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "tpreg/equilibrium/elasticity.hpp"
#include "tpreg/errors.hpp"

namespace tpreg::equilibrium {

double equilibrium_shift(const MarketPrimitives& primitives, const PolicyRegime& regime,
                         const SolverOptions& options) {
  const Equilibrium reg = solve_regulated(primitives, regime, options);
  const Equilibrium unreg = solve_unregulated(primitives, options);
  return reg.quantity - unreg.quantity;
}

MarketPrimitives apply_shocks(const MarketPrimitives& primitives, double productivity_shock,
                              double demand_shock) {
  MarketPrimitives out = primitives;
  out.production.tfp *= 1.0 + productivity_shock;
  out.demand.demand_shift *= 1.0 + demand_shock;
  if (!(out.production.tfp > 0.0) || !(out.demand.demand_shift > 0.0)) {
    throw DomainError("apply_shocks: tfp and demand_shift must stay positive");
  }
  return out;
}

double local_supply_elasticity(const MarketPrimitives& primitives, const PolicyRegime& regime,
                               double bump, const SolverOptions& options) {
  if (!(bump > 0.0) || !(bump < 1.0)) {
    throw DomainError("local_supply_elasticity: bump must lie in (0, 1)");
  }
  regime.validate();
  const double gamma = regime.gamma();
  auto solve_at = [&](double factor) {
    MarketPrimitives p = primitives;
    p.demand.demand_shift *= factor;
    if (regime.has_price_control()) return solve_price_constrained(p, regime.rho, gamma, options);
    return solve_cost_minimizing(p, gamma, options);
  };
  const Equilibrium up = solve_at(1.0 + bump);
  const Equilibrium down = solve_at(1.0 - bump);
  const double d_log_p = std::log(up.full_price) - std::log(down.full_price);
  if (d_log_p == 0.0) {
    throw ConvergenceError("local_supply_elasticity: price did not move; increase bump");
  }
  return (std::log(up.quantity) - std::log(down.quantity)) / d_log_p;
}

MarketPrimitives BroadbandLink::at(const MarketPrimitives& base, double broadband_z) const {
  MarketPrimitives out = base;
  out.demand.broadband_z = broadband_z;
  out.telehealth_supply.elasticity *= std::exp(telehealth_elasticity_gain * broadband_z);
  return out;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SolverOptions& options) {
  std::vector<SweepRow> rows;
  rows.reserve(spec.regimes.size() * spec.broadband_grid.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const PolicyRegime& regime : spec.regimes) {
    for (double b : spec.broadband_grid) {
      const MarketPrimitives p = spec.link.at(spec.base, b);
      const Equilibrium unreg = solve_unregulated(p, options);
      const Equilibrium reg = solve_regulated(p, regime, options);

      SweepRow row;
      row.regime = regime.label();
      row.broadband_z = b;
      row.y_unreg = unreg.quantity;
      row.y_reg = reg.quantity;
      row.shift = reg.quantity - unreg.quantity;

      const double s_i = unreg.inperson_cost_share();
      const double sigma = p.production.substitution;
      const double eps_t = p.telehealth_supply.cost_elasticity();
      const double eps_i = p.inperson_supply.cost_elasticity();
      try {
        const ElasticitySummary summary = eta_difference(s_i, sigma, eps_t, eps_i);
        row.eta_unreg = summary.eta_unreg;
        row.eta_reg = summary.eta_reg;
        row.diff_direct = summary.diff_direct;
        row.diff_factorized = summary.diff_factorized;
        row.sign_ok = summary.sign_matches_supply;
      } catch (const AssumptionViolation&) {
        row.eta_unreg = eta_unregulated(s_i, sigma, eps_t, eps_i);
        row.eta_reg = eta_regulated(s_i, eps_t, eps_i);
        row.diff_direct = nan;
        row.diff_factorized = nan;
        row.sign_ok = false;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  const auto old_precision = out.precision(17);
  out << "regime,broadband_z,Y_unreg,Y_reg,shift,eta_unreg,eta_reg,diff_direct,"
         "diff_factorized,sign_ok\n";
  for (const SweepRow& r : rows) {
    out << r.regime << ',' << r.broadband_z << ',' << r.y_unreg << ',' << r.y_reg << ','
        << r.shift << ',' << r.eta_unreg << ',' << r.eta_reg << ',' << r.diff_direct << ','
        << r.diff_factorized << ',' << (r.sign_ok ? "true" : "false") << '\n';
  }
  out.precision(old_precision);
}

}  // namespace tpreg::equilibrium
