#pragma once

namespace tpreg::equilibrium {

struct CostShares {
  double telehealth = 0.0;  // s_T
  double inperson = 0.0;    // s_I, always 1 - s_T
};

/// s_T = r_T T / (r_T T + r_I I).
CostShares cost_shares(double telehealth_price, double telehealth_input,
                       double inperson_price, double inperson_input);

/// Relative input response I^/T^ along the unregulated supply curve,
/// (1 + sigma eps_T) / (1 + sigma eps_I).
double input_response_ratio(double sigma, double eps_t, double eps_i);

// The elasticity functions below take marginal-cost elasticities
// eps = x Gamma''(x) / Gamma'(x) (see InputSupplySpec::cost_elasticity).

/// Supply elasticity of the cost-minimizing (unregulated) supply curve:
/// (s_T + s_I a) / (s_T eps_T + s_I a eps_I), a = input_response_ratio.
double eta_unregulated(double s_i, double sigma, double eps_t, double eps_i);

/// Supply elasticity of the supply curve under the compliance condition
/// r_T T / Y = rho, at a point where output elasticities equal cost shares:
/// (1 + eps_T) / (eps_T (1 - s_I + eps_I) + eps_I s_I).
double eta_regulated(double s_i, double eps_t, double eps_i);

/// The published form s_I (1 + eps_T) / (...). It differs from
/// eta_regulated by the factor s_I and does not reduce to 1/eps when
/// eps_T == eps_I; kept for comparison.
double eta_regulated_printed(double s_i, double eps_t, double eps_i);

enum class Sign { Negative = -1, Zero = 0, Positive = 1 };

struct ElasticitySummary {
  double s_t = 0.0;
  double s_i = 0.0;
  double alpha = 0.0;
  double eta_unreg = 0.0;
  double eta_reg = 0.0;
  double eta_reg_printed = 0.0;
  /// eta_unreg - eta_reg.
  double diff_direct = 0.0;
  /// eta_unreg - eta_reg_printed (A/B - C/D with C = s_I (1 + eps_T)).
  double diff_direct_printed = 0.0;
  /// (eps_T - eps_I)(1 - s_I)(sigma s_I eps_T + (1 - sigma s_I) eps_I + sigma) / (B D).
  double diff_factorized = 0.0;
  /// sign(diff_direct) == sign(eps_T - eps_I), |diff| <= 1e-12 counting as zero.
  bool sign_matches = false;
  /// Same test for diff_direct_printed.
  bool sign_matches_printed = false;
  /// sign(diff_direct) == sign(1/eps_T - 1/eps_I): the ordering of the
  /// inputs' supply elasticities rather than their marginal-cost elasticities.
  bool sign_matches_supply = false;
};

/// Both routes to eta_unreg - eta_reg. Throws AssumptionViolation when
/// sigma * s_I >= 1.
ElasticitySummary eta_difference(double s_i, double sigma, double eps_t, double eps_i);

/// Sign with |x| <= tol mapped to Zero.
Sign sign_of(double x, double tol = 1e-12);

}  // namespace tpreg::equilibrium
