#include "tpreg/equilibrium/demand.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tpreg/errors.hpp"

namespace tpreg::equilibrium {

double demand_eta(double broadband_z, double gamma, double eta0, double eta1, double eta2) {
  if (!(eta1 > 0.0 && eta2 > eta1)) {
    throw DomainError("demand_eta: requires eta2 > eta1 > 0");
  }
  const double eta = eta0 + eta1 * broadband_z - eta2 * gamma * broadband_z;
  if (!(eta > 0.0 && eta < 1.0)) {
    std::ostringstream msg;
    msg << "demand_eta: eta = " << eta << " outside (0, 1) at B = " << broadband_z
        << ", gamma = " << gamma;
    throw DomainError(msg.str());
  }
  return eta;
}

double demand_quantity(double money_price, double wage, double time_per_unit, double eta,
                       double demand_shift) {
  const double total = money_price + wage * time_per_unit;
  if (!(total > 0.0)) throw DomainError("demand_quantity: total price must be > 0");
  if (!(eta > 0.0)) throw DomainError("demand_quantity: eta must be > 0");
  return demand_shift * std::pow(total, -1.0 / eta);
}

ElasticityOrder b1_elasticity_order(double wage, double time_per_unit, double money_price) {
  if (wage < 0.0 || time_per_unit < 0.0 || money_price < 0.0) {
    throw DomainError("b1_elasticity_order: price components must be >= 0");
  }
  const double time_price = wage * time_per_unit;
  if (time_price == 0.0 && money_price == 0.0) {
    throw DomainError("b1_elasticity_order: time price and money price are both zero");
  }
  if (time_price > money_price) return ElasticityOrder::TimeGreater;
  if (time_price < money_price) return ElasticityOrder::MoneyGreater;
  return ElasticityOrder::Equal;
}

SubstitutionSign b2_substitution_sign(double wage, double composite_time, double composite_price,
                                      double medical_time, double medical_price) {
  const double comp_time_price = wage * composite_time;
  const double med_time_price = wage * medical_time;
  const double comp_total = comp_time_price + composite_price;
  const double med_total = med_time_price + medical_price;
  if (!(comp_total > 0.0 && med_total > 0.0)) {
    throw DomainError("b2_substitution_sign: total prices must be > 0");
  }
  // Compare time shares by cross-multiplication to avoid rounding noise.
  const double lhs = comp_time_price * med_total;
  const double rhs = med_time_price * comp_total;
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  if (std::abs(lhs - rhs) <= 1e-14 * scale) return SubstitutionSign::Zero;
  return lhs > rhs ? SubstitutionSign::Positive : SubstitutionSign::Negative;
}

}  // namespace tpreg::equilibrium
