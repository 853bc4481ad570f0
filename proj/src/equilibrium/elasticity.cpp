#include "tpreg/equilibrium/elasticity.hpp"

#include <cmath>

#include "tpreg/errors.hpp"

namespace tpreg::equilibrium {

namespace {

void require_share(double s_i, const char* op) {
  if (!(s_i > 0.0 && s_i < 1.0)) throw DomainError(std::string(op) + ": s_I must lie in (0, 1)");
}

void require_positive(double x, const char* op, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(op) + ": " + name + " must be > 0");
  }
}

// The four aggregates of the elasticity difference: eta_unreg = A/B and
// eta_reg = C/D.
struct Aggregates {
  double a, b, c, d, c_printed;
};

Aggregates aggregates(double s_i, double sigma, double eps_t, double eps_i) {
  const double s_t = 1.0 - s_i;
  const double alpha = input_response_ratio(sigma, eps_t, eps_i);
  Aggregates g{};
  g.a = s_t + s_i * alpha;
  g.b = s_t * eps_t + s_i * alpha * eps_i;
  g.c = 1.0 + eps_t;
  g.c_printed = s_i * (1.0 + eps_t);
  g.d = eps_t * (1.0 - s_i + eps_i) + eps_i * s_i;
  return g;
}

}  // namespace

CostShares cost_shares(double telehealth_price, double telehealth_input, double inperson_price,
                       double inperson_input) {
  for (double v : {telehealth_price, telehealth_input, inperson_price, inperson_input}) {
    if (!(v > 0.0)) throw DomainError("cost_shares: inputs and prices must be > 0");
  }
  const double spend_t = telehealth_price * telehealth_input;
  const double spend_i = inperson_price * inperson_input;
  CostShares out;
  out.telehealth = spend_t / (spend_t + spend_i);
  out.inperson = 1.0 - out.telehealth;
  return out;
}

double input_response_ratio(double sigma, double eps_t, double eps_i) {
  return (1.0 + sigma * eps_t) / (1.0 + sigma * eps_i);
}

double eta_unregulated(double s_i, double sigma, double eps_t, double eps_i) {
  require_share(s_i, "eta_unregulated");
  require_positive(sigma, "eta_unregulated", "sigma");
  require_positive(eps_t, "eta_unregulated", "eps_T");
  require_positive(eps_i, "eta_unregulated", "eps_I");
  const Aggregates g = aggregates(s_i, sigma, eps_t, eps_i);
  return g.a / g.b;
}

double eta_regulated(double s_i, double eps_t, double eps_i) {
  require_share(s_i, "eta_regulated");
  require_positive(eps_t, "eta_regulated", "eps_T");
  require_positive(eps_i, "eta_regulated", "eps_I");
  const Aggregates g = aggregates(s_i, 1.0, eps_t, eps_i);
  return g.c / g.d;
}

double eta_regulated_printed(double s_i, double eps_t, double eps_i) {
  require_share(s_i, "eta_regulated_printed");
  require_positive(eps_t, "eta_regulated_printed", "eps_T");
  require_positive(eps_i, "eta_regulated_printed", "eps_I");
  const Aggregates g = aggregates(s_i, 1.0, eps_t, eps_i);
  return g.c_printed / g.d;
}

Sign sign_of(double x, double tol) {
  if (std::abs(x) <= tol) return Sign::Zero;
  return x > 0.0 ? Sign::Positive : Sign::Negative;
}

ElasticitySummary eta_difference(double s_i, double sigma, double eps_t, double eps_i) {
  require_share(s_i, "eta_difference");
  require_positive(sigma, "eta_difference", "sigma");
  require_positive(eps_t, "eta_difference", "eps_T");
  require_positive(eps_i, "eta_difference", "eps_I");
  if (sigma * s_i >= 1.0) {
    throw AssumptionViolation("eta_difference: sigma * s_I must be < 1");
  }
  const Aggregates g = aggregates(s_i, sigma, eps_t, eps_i);

  ElasticitySummary out;
  out.s_i = s_i;
  out.s_t = 1.0 - s_i;
  out.alpha = input_response_ratio(sigma, eps_t, eps_i);
  out.eta_unreg = g.a / g.b;
  out.eta_reg = g.c / g.d;
  out.eta_reg_printed = g.c_printed / g.d;
  out.diff_direct = out.eta_unreg - out.eta_reg;
  out.diff_direct_printed = out.eta_unreg - out.eta_reg_printed;
  const double bracket = sigma * s_i * eps_t + (1.0 - sigma * s_i) * eps_i + sigma;
  out.diff_factorized = (eps_t - eps_i) * (1.0 - s_i) * bracket / (g.b * g.d);

  const Sign cost_order = sign_of(eps_t - eps_i, 0.0);
  const Sign supply_order = sign_of(1.0 / eps_t - 1.0 / eps_i, 0.0);
  out.sign_matches = sign_of(out.diff_direct) == cost_order;
  out.sign_matches_printed = sign_of(out.diff_direct_printed) == cost_order;
  out.sign_matches_supply = sign_of(out.diff_direct) == supply_order;
  return out;
}

}  // namespace tpreg::equilibrium
