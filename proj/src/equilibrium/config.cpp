#include "tpreg/equilibrium/config.hpp"

#include <string>

#include "tpreg/json_util.hpp"

namespace tpreg::equilibrium {

using nlohmann::json;
using json_util::read;
using json_util::reject_unknown;

namespace {

InputSupplySpec supply_from_json(const json& j, const char* where) {
  reject_unknown(j, where, {"elasticity", "scale"});
  InputSupplySpec s;
  read(j, "elasticity", s.elasticity, where);
  read(j, "scale", s.scale, where);
  s.validate();
  return s;
}

}  // namespace

MarketPrimitives primitives_from_json(const json& j) {
  reject_unknown(j, "primitives", {"telehealth_supply", "inperson_supply", "production", "demand"});
  MarketPrimitives p;
  if (j.contains("telehealth_supply")) {
    p.telehealth_supply = supply_from_json(j["telehealth_supply"], "telehealth_supply");
  }
  if (j.contains("inperson_supply")) {
    p.inperson_supply = supply_from_json(j["inperson_supply"], "inperson_supply");
  }
  if (j.contains("production")) {
    const json& pr = j["production"];
    reject_unknown(pr, "production", {"tfp", "share", "substitution"});
    read(pr, "tfp", p.production.tfp, "production");
    read(pr, "share", p.production.share, "production");
    read(pr, "substitution", p.production.substitution, "production");
  }
  if (j.contains("demand")) {
    const json& d = j["demand"];
    reject_unknown(d, "demand",
                   {"eta0", "eta1", "eta2", "broadband_z", "wage", "time_per_unit",
                    "composite_money_price", "composite_time_per_unit", "demand_shift"});
    read(d, "eta0", p.demand.eta0, "demand");
    read(d, "eta1", p.demand.eta1, "demand");
    read(d, "eta2", p.demand.eta2, "demand");
    read(d, "broadband_z", p.demand.broadband_z, "demand");
    read(d, "wage", p.demand.wage, "demand");
    read(d, "time_per_unit", p.demand.time_per_unit, "demand");
    read(d, "composite_money_price", p.demand.composite_money_price, "demand");
    read(d, "composite_time_per_unit", p.demand.composite_time_per_unit, "demand");
    read(d, "demand_shift", p.demand.demand_shift, "demand");
  }
  p.validate();
  return p;
}

PolicyRegime regime_from_json(const json& j) {
  reject_unknown(j, "regime", {"price", "rho", "cost", "gamma_cc"});
  PolicyRegime r;
  std::string price = "none";
  std::string cost = "none";
  read(j, "price", price, "regime");
  read(j, "cost", cost, "regime");
  read(j, "rho", r.rho, "regime");
  read(j, "gamma_cc", r.gamma_cc, "regime");
  if (price == "none") r.price = PriceControl::None;
  else if (price == "floor") r.price = PriceControl::Floor;
  else if (price == "ceiling") r.price = PriceControl::Ceiling;
  else if (price == "parity") r.price = PriceControl::Parity;
  else throw ConfigError("regime.price: expected none|floor|ceiling|parity, got \"" + price + "\"");
  if (cost == "none") r.cost = CostControl::None;
  else if (cost == "parity") r.cost = CostControl::Parity;
  else if (cost == "ceiling") r.cost = CostControl::Ceiling;
  else throw ConfigError("regime.cost: expected none|parity|ceiling, got \"" + cost + "\"");
  if (r.price == PriceControl::None && j.contains("rho")) {
    throw ConfigError("regime: rho given without a price control");
  }
  r.validate();
  return r;
}

SolverOptions solver_options_from_json(const json& j) {
  reject_unknown(j, "solver", {"lower", "upper", "log_tolerance", "max_bisections",
                               "newton_steps", "scan_points", "residual_tolerance"});
  SolverOptions o;
  read(j, "lower", o.lower, "solver");
  read(j, "upper", o.upper, "solver");
  read(j, "log_tolerance", o.log_tolerance, "solver");
  read(j, "max_bisections", o.max_bisections, "solver");
  read(j, "newton_steps", o.newton_steps, "solver");
  read(j, "scan_points", o.scan_points, "solver");
  read(j, "residual_tolerance", o.residual_tolerance, "solver");
  if (!(o.lower > 0.0 && o.upper > o.lower)) {
    throw ConfigError("solver: require 0 < lower < upper");
  }
  if (o.scan_points < 2 || o.max_bisections < 1 || o.newton_steps < 0) {
    throw ConfigError("solver: iteration counts out of range");
  }
  return o;
}

BroadbandLink broadband_link_from_json(const json& j) {
  reject_unknown(j, "broadband_link", {"telehealth_elasticity_gain"});
  BroadbandLink link;
  read(j, "telehealth_elasticity_gain", link.telehealth_elasticity_gain, "broadband_link");
  return link;
}

SweepSpec sweep_from_json(const json& j) {
  json_util::require_object(j, "config");
  SweepSpec spec;
  spec.base = primitives_from_json(j.value("primitives", json::object()));
  if (j.contains("broadband_link")) spec.link = broadband_link_from_json(j["broadband_link"]);
  if (j.contains("regimes")) {
    if (!j["regimes"].is_array()) throw ConfigError("regimes: expected an array");
    for (const json& r : j["regimes"]) spec.regimes.push_back(regime_from_json(r));
  } else {
    spec.regimes = {PolicyRegime::none()};
  }
  spec.broadband_grid = {spec.base.demand.broadband_z};
  read(j, "broadband_grid", spec.broadband_grid, "config");
  if (spec.broadband_grid.empty()) throw ConfigError("broadband_grid: must not be empty");
  for (double b : spec.broadband_grid) {
    MarketPrimitives at = spec.link.at(spec.base, b);
    at.validate();
    for (const PolicyRegime& r : spec.regimes) {
      const double eta = at.demand.eta0 + at.demand.eta1 * b - at.demand.eta2 * r.gamma() * b;
      if (!(eta > 0.0 && eta < 1.0)) {
        throw ConfigError("broadband_grid: eta leaves (0, 1) at broadband_z = " +
                          std::to_string(b) + " under " + r.label());
      }
    }
  }
  return spec;
}

json to_json(const Equilibrium& e) {
  return json{{"quantity", e.quantity},
              {"full_price", e.full_price},
              {"telehealth_input", e.telehealth_input},
              {"inperson_input", e.inperson_input},
              {"telehealth_price", e.telehealth_price},
              {"inperson_price", e.inperson_price},
              {"telehealth_unit_revenue", e.telehealth_unit_revenue()},
              {"telehealth_cost_share", e.telehealth_cost_share()}};
}

json to_json(const ConditionResiduals& r) {
  json out = json::object();
  for (const auto& [name, value] : r.named()) out[name] = value;
  return out;
}

}  // namespace tpreg::equilibrium
