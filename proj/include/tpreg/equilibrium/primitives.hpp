#pragma once

#include <string>

namespace tpreg::equilibrium {

/// Isoelastic input supply: the marginal cost of the input is
/// scale * x^(1/elasticity), so `elasticity` is the supply elasticity of the
/// input (d ln x / d ln price).
struct InputSupplySpec {
  double elasticity = 1.0;
  double scale = 1.0;

  /// x * Gamma''(x) / Gamma'(x), the marginal-cost elasticity that enters the
  /// closed-form supply elasticities. Equals 1 / elasticity.
  double cost_elasticity() const { return 1.0 / elasticity; }

  void validate() const;
};

/// Y = tfp * [share * T^r + (1 - share) * I^r]^(1/r) with r = 1 - 1/substitution.
/// substitution == 1 is the Cobb-Douglas limit.
struct ProductionSpec {
  double tfp = 1.0;
  double share = 0.5;
  double substitution = 1.0;

  double ces_exponent() const { return 1.0 - 1.0 / substitution; }
  bool is_cobb_douglas() const;

  /// tfp * F(T, I).
  double output(double telehealth, double inperson) const;

  /// F_T / F_I, the marginal rate of technical substitution.
  double mrts(double telehealth, double inperson) const;

  void validate() const;
};

/// Quasi-linear consumer demand Y = demand_shift * (P + w*tau)^(-1/eta) where
/// eta = eta0 + eta1*B - eta2*gamma*B. The composite good's total price is
/// normalized to one when deriving demand; q and s only enter B2.
struct DemandSpec {
  double eta0 = 0.5;
  double eta1 = 0.01;
  double eta2 = 0.05;
  double broadband_z = 0.0;
  double wage = 0.0;
  double time_per_unit = 0.0;
  double composite_money_price = 1.0;
  double composite_time_per_unit = 0.0;
  double demand_shift = 1.0;

  /// Demand curvature at this broadband level under cost-control intensity gamma.
  double eta(double gamma) const;

  /// Money price plus time price, P + w*tau.
  double total_price(double money_price) const { return money_price + wage * time_per_unit; }

  /// Quantity demanded at money price P under cost-control intensity gamma.
  double quantity(double money_price, double gamma) const;

  void validate() const;
};

enum class PriceControl { None, Floor, Ceiling, Parity };
enum class CostControl { None, Parity, Ceiling };

/// One price control on the regulated per-unit telehealth revenue r_T*T/Y and
/// one cost control on consumer out-of-pocket cost. The two enums make the
/// mutual exclusivity within each family structural.
struct PolicyRegime {
  static constexpr double kDefaultCostCeiling = 0.25;

  PriceControl price = PriceControl::None;
  double rho = 0.0;
  CostControl cost = CostControl::None;
  double gamma_cc = kDefaultCostCeiling;

  static PolicyRegime none() { return {}; }
  static PolicyRegime price_floor(double rho) { return {PriceControl::Floor, rho}; }
  static PolicyRegime price_ceiling(double rho) { return {PriceControl::Ceiling, rho}; }
  static PolicyRegime price_parity(double rho) { return {PriceControl::Parity, rho}; }
  static PolicyRegime cost_parity() { return {PriceControl::None, 0.0, CostControl::Parity}; }
  static PolicyRegime cost_ceiling(double gamma_cc = kDefaultCostCeiling) {
    return {PriceControl::None, 0.0, CostControl::Ceiling, gamma_cc};
  }

  /// Demand-rotation intensity: 0 without cost control, 1 under parity,
  /// gamma_cc under a ceiling.
  double gamma() const;

  bool has_price_control() const { return price != PriceControl::None; }

  /// Binding rule against the unregulated per-unit telehealth revenue:
  /// Floor/Parity bind above it, Ceiling binds below it.
  bool binds(double unregulated_unit_revenue) const;

  std::string label() const;

  void validate() const;
};

struct MarketPrimitives {
  InputSupplySpec telehealth_supply;
  InputSupplySpec inperson_supply;
  ProductionSpec production;
  DemandSpec demand;

  void validate() const;
};

/// A solved market state. Also used for points on a supply curve that need
/// not clear the market (e.g. E(rho)).
struct Equilibrium {
  double quantity = 0.0;
  double full_price = 0.0;
  double telehealth_input = 0.0;
  double inperson_input = 0.0;
  double telehealth_price = 0.0;
  double inperson_price = 0.0;

  /// r_T * T / Y, the quantity a price control regulates.
  double telehealth_unit_revenue() const {
    return telehealth_price * telehealth_input / quantity;
  }
  double telehealth_cost_share() const;
  double inperson_cost_share() const { return 1.0 - telehealth_cost_share(); }
};

/// Consumer-side money price components (deductible, copay, coinsurance,
/// premium) and how the service cost splits across provider, insurer and
/// administration.
struct FullPriceSpec {
  double annual_deductible = 0.0;
  double fixed_copay = 0.0;
  double service_cost = 0.0;
  double coinsurance_rate = 0.2;
  double premium = 0.0;
  double provider_share = 1.0;
  double insurer_share = 0.0;
  double admin_share = 0.0;

  void validate() const;
};

struct FullPriceBreakdown {
  double out_of_pocket = 0.0;  // E_oop
  double full_price = 0.0;     // P_Y
};

/// scale * quantity^(1/elasticity).
double marginal_input_price(const InputSupplySpec& spec, double quantity);

/// E_oop = D/Y + c_fixed + rate*S and P_Y = E_oop + r/Y.
FullPriceBreakdown full_price(const FullPriceSpec& spec, double quantity);

}  // namespace tpreg::equilibrium
