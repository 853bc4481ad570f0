#include "tpreg/equilibrium/primitives.hpp"

#include <cmath>
#include <sstream>

#include "tpreg/equilibrium/demand.hpp"
#include "tpreg/errors.hpp"

namespace tpreg::equilibrium {

namespace {

// |r| below this uses the Cobb-Douglas limit of the CES aggregator.
constexpr double kCobbDouglasTolerance = 1e-10;

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void InputSupplySpec::validate() const {
  require(std::isfinite(elasticity) && elasticity > 0.0, "input supply elasticity must be > 0");
  require(std::isfinite(scale) && scale > 0.0, "input supply scale must be > 0");
}

bool ProductionSpec::is_cobb_douglas() const {
  return std::abs(ces_exponent()) < kCobbDouglasTolerance;
}

double ProductionSpec::output(double telehealth, double inperson) const {
  if (is_cobb_douglas()) {
    return tfp * std::exp(share * std::log(telehealth) + (1.0 - share) * std::log(inperson));
  }
  const double r = ces_exponent();
  const double inner = share * std::pow(telehealth, r) + (1.0 - share) * std::pow(inperson, r);
  return tfp * std::pow(inner, 1.0 / r);
}

double ProductionSpec::mrts(double telehealth, double inperson) const {
  // F_T / F_I = share/(1-share) * (T/I)^(r-1); r = 0 gives the Cobb-Douglas ratio.
  const double r = is_cobb_douglas() ? 0.0 : ces_exponent();
  return share / (1.0 - share) * std::pow(telehealth / inperson, r - 1.0);
}

void ProductionSpec::validate() const {
  require(std::isfinite(tfp) && tfp > 0.0, "tfp must be > 0");
  require(share > 0.0 && share < 1.0, "CES share must lie in (0, 1)");
  require(std::isfinite(substitution) && substitution > 0.0,
          "elasticity of substitution must be > 0");
}

double DemandSpec::eta(double gamma) const {
  return demand_eta(broadband_z, gamma, eta0, eta1, eta2);
}

double DemandSpec::quantity(double money_price, double gamma) const {
  return demand_quantity(money_price, wage, time_per_unit, eta(gamma), demand_shift);
}

void DemandSpec::validate() const {
  require(eta0 > 0.0, "eta0 must be > 0");
  require(eta1 > 0.0 && eta2 > eta1, "demand modifiers must satisfy eta2 > eta1 > 0");
  require(wage >= 0.0 && time_per_unit >= 0.0, "time price components must be >= 0");
  require(composite_money_price > 0.0, "composite money price must be > 0");
  require(composite_time_per_unit >= 0.0, "composite time per unit must be >= 0");
  require(std::isfinite(demand_shift) && demand_shift > 0.0, "demand shift must be > 0");
  const double base = eta0 + eta1 * broadband_z;
  if (!(base > 0.0 && base < 1.0)) {
    std::ostringstream msg;
    msg << "demand curvature eta = " << base << " at broadband_z = " << broadband_z
        << " lies outside (0, 1)";
    throw ConfigError(msg.str());
  }
}

double PolicyRegime::gamma() const {
  switch (cost) {
    case CostControl::None: return 0.0;
    case CostControl::Parity: return 1.0;
    case CostControl::Ceiling: return gamma_cc;
  }
  return 0.0;
}

bool PolicyRegime::binds(double unregulated_unit_revenue) const {
  switch (price) {
    case PriceControl::None: return false;
    case PriceControl::Floor:
    case PriceControl::Parity: return rho > unregulated_unit_revenue;
    case PriceControl::Ceiling: return rho < unregulated_unit_revenue;
  }
  return false;
}

std::string PolicyRegime::label() const {
  std::ostringstream out;
  switch (price) {
    case PriceControl::None: break;
    case PriceControl::Floor: out << "price_floor(" << rho << ")"; break;
    case PriceControl::Ceiling: out << "price_ceiling(" << rho << ")"; break;
    case PriceControl::Parity: out << "price_parity(" << rho << ")"; break;
  }
  if (cost != CostControl::None && price != PriceControl::None) out << '+';
  switch (cost) {
    case CostControl::None: break;
    case CostControl::Parity: out << "cost_parity"; break;
    case CostControl::Ceiling: out << "cost_ceiling(" << gamma_cc << ")"; break;
  }
  const std::string text = out.str();
  return text.empty() ? "none" : text;
}

void PolicyRegime::validate() const {
  if (price != PriceControl::None) {
    require(std::isfinite(rho) && rho > 0.0, "price-control rho must be > 0");
  }
  if (cost == CostControl::Ceiling) {
    require(gamma_cc > 0.0 && gamma_cc < 1.0, "cost ceiling gamma_cc must lie in (0, 1)");
  }
}

void MarketPrimitives::validate() const {
  telehealth_supply.validate();
  inperson_supply.validate();
  production.validate();
  demand.validate();
}

double Equilibrium::telehealth_cost_share() const {
  const double spend_t = telehealth_price * telehealth_input;
  return spend_t / (spend_t + inperson_price * inperson_input);
}

void FullPriceSpec::validate() const {
  require(annual_deductible >= 0.0 && fixed_copay >= 0.0 && service_cost >= 0.0 &&
              premium >= 0.0,
          "monetary components must be >= 0");
  require(coinsurance_rate >= 0.0 && coinsurance_rate <= 1.0,
          "coinsurance rate must lie in [0, 1]");
  for (double s : {provider_share, insurer_share, admin_share}) {
    require(s >= 0.0 && s <= 1.0, "service-cost shares must lie in [0, 1]");
  }
  require(std::abs(provider_share + insurer_share + admin_share - 1.0) < 1e-12,
          "provider, insurer and admin shares must sum to 1");
}

double marginal_input_price(const InputSupplySpec& spec, double quantity) {
  if (!(quantity > 0.0)) throw DomainError("marginal_input_price: quantity must be > 0");
  return spec.scale * std::pow(quantity, 1.0 / spec.elasticity);
}

FullPriceBreakdown full_price(const FullPriceSpec& spec, double quantity) {
  if (!(quantity > 0.0)) throw DomainError("full_price: quantity must be > 0");
  spec.validate();
  FullPriceBreakdown out;
  out.out_of_pocket = spec.annual_deductible / quantity + spec.fixed_copay +
                      spec.coinsurance_rate * spec.service_cost;
  out.full_price = out.out_of_pocket + spec.premium / quantity;
  return out;
}

}  // namespace tpreg::equilibrium
