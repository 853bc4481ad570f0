#pragma once

namespace tpreg::equilibrium {

/// eta(B, gamma) = eta0 + eta1 B - eta2 gamma B. Requires eta2 > eta1 > 0 and
/// throws DomainError unless the result lies in (0, 1). The price elasticity
/// of demand is -1/eta.
double demand_eta(double broadband_z, double gamma, double eta0, double eta1, double eta2);

/// demand_shift * (P + w tau)^(-1/eta).
double demand_quantity(double money_price, double wage, double time_per_unit, double eta,
                       double demand_shift);

enum class ElasticityOrder { TimeGreater, Equal, MoneyGreater };

/// Orders |time-price elasticity| against |money-price elasticity|: both
/// share the total-price elasticity, so the larger price component wins.
ElasticityOrder b1_elasticity_order(double wage, double time_per_unit, double money_price);

enum class SubstitutionSign { Negative, Zero, Positive };

/// Sign of the broadband (wage) substitution effect on medical-services
/// demand: positive iff w s / (w s + q) > w tau / (w tau + P).
SubstitutionSign b2_substitution_sign(double wage, double composite_time,
                                      double composite_price, double medical_time,
                                      double medical_price);

}  // namespace tpreg::equilibrium
