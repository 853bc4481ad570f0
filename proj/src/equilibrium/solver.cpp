#include "tpreg/equilibrium/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "tpreg/errors.hpp"

namespace tpreg::equilibrium {

namespace {

using Residual = std::function<std::optional<double>(double)>;

double rel(double value, double target) {
  const double scale = std::max(std::abs(target), std::numeric_limits<double>::min());
  return (value - target) / scale;
}

bool finite_positive(const Equilibrium& e) {
  for (double v : {e.quantity, e.full_price, e.telehealth_input, e.inperson_input,
                   e.telehealth_price, e.inperson_price}) {
    if (!std::isfinite(v) || !(v > 0.0)) return false;
  }
  return true;
}

Equilibrium finish_point(const MarketPrimitives& p, double t, double i, double y) {
  Equilibrium e;
  e.telehealth_input = t;
  e.inperson_input = i;
  e.quantity = y;
  e.telehealth_price = marginal_input_price(p.telehealth_supply, t);
  e.inperson_price = marginal_input_price(p.inperson_supply, i);
  e.full_price = (e.telehealth_price * t + e.inperson_price * i) / y;
  return e;
}

// ln Y_supply - ln Y_demand at a supply point, nullopt when undefined.
std::optional<double> excess_supply(const MarketPrimitives& p, const Equilibrium& e,
                                    double gamma) {
  if (!finite_positive(e)) return std::nullopt;
  const double demand = p.demand.quantity(e.full_price, gamma);
  if (!(demand > 0.0) || !std::isfinite(demand)) return std::nullopt;
  return std::log(e.quantity) - std::log(demand);
}

// Root of f on [ln lower, ln upper]: the first sign change on a uniform
// grid, refined by bisection and a few damped Newton steps.
double find_log_root(const Residual& f, const SolverOptions& o, const char* what) {
  const double lo = std::log(o.lower);
  const double hi = std::log(o.upper);
  const int n = std::max(o.scan_points, 2);

  bool any_defined = false;
  std::optional<double> prev_x;
  double prev_f = 0.0;
  double a = 0.0, b = 0.0, fa = 0.0;
  bool bracketed = false;
  for (int k = 0; k < n && !bracketed; ++k) {
    const double x = lo + (hi - lo) * k / (n - 1);
    const auto fx = f(x);
    if (!fx) {
      prev_x.reset();
      continue;
    }
    any_defined = true;
    if (*fx == 0.0) return x;
    if (prev_x && (prev_f < 0.0) != (*fx < 0.0)) {
      a = *prev_x;
      fa = prev_f;
      b = x;
      bracketed = true;
    }
    prev_x = x;
    prev_f = *fx;
  }
  if (!any_defined) {
    throw InfeasibleRegime(std::string(what) + ": no feasible point on the search interval",
                           {});
  }
  if (!bracketed) {
    throw BracketError(std::string(what) + ": no sign change on the search interval", {});
  }

  for (int it = 0; it < o.max_bisections && (b - a) > o.log_tolerance; ++it) {
    const double m = 0.5 * (a + b);
    const auto fm = f(m);
    if (!fm) {
      // Undefined interior points only occur at a feasibility edge; move
      // the endpoint that sits on the undefined side.
      const auto fa_now = f(a);
      if (fa_now) b = m; else a = m;
      continue;
    }
    if (*fm == 0.0) return m;
    if ((fa < 0.0) == (*fm < 0.0)) {
      a = m;
      fa = *fm;
    } else {
      b = m;
    }
  }

  double x = 0.5 * (a + b);
  auto fx = f(x);
  if (!fx) return x;
  for (int step = 0; step < o.newton_steps; ++step) {
    const double h = 1e-6;
    const auto fp = f(x + h);
    const auto fm = f(x - h);
    if (!fp || !fm) break;
    const double slope = (*fp - *fm) / (2.0 * h);
    if (slope == 0.0 || !std::isfinite(slope)) break;
    double dx = -*fx / slope;
    bool improved = false;
    for (int halving = 0; halving < 20; ++halving, dx *= 0.5) {
      const auto fn = f(x + dx);
      if (fn && std::abs(*fn) < std::abs(*fx)) {
        x += dx;
        fx = fn;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return x;
}

void check_converged(const ConditionResiduals& r, bool regulated, const SolverOptions& o,
                     const char* what) {
  const double worst = std::max(regulated ? r.max_regulated_supply() : r.max_unregulated_supply(),
                                std::abs(r.final_demand));
  if (!(worst <= o.residual_tolerance)) {
    std::ostringstream msg;
    msg << what << ": residual " << worst << " exceeds tolerance " << o.residual_tolerance;
    throw ConvergenceError(msg.str(), r.named());
  }
}

}  // namespace

double ConditionResiduals::max_unregulated_supply() const {
  return std::max({std::abs(full_price), std::abs(production), std::abs(inperson_supply),
                   std::abs(telehealth_supply), std::abs(cost_minimization)});
}

double ConditionResiduals::max_regulated_supply() const {
  return std::max({std::abs(full_price), std::abs(production), std::abs(inperson_supply),
                   std::abs(telehealth_supply), std::abs(price_compliance)});
}

std::vector<std::pair<std::string, double>> ConditionResiduals::named() const {
  return {{"FP", full_price},       {"FD", final_demand},        {"PF", production},
          {"IS", inperson_supply},  {"TS", telehealth_supply},   {"CMC", cost_minimization},
          {"PRC", price_compliance}};
}

ConditionResiduals condition_residuals(const MarketPrimitives& p, const Equilibrium& s,
                                       double gamma, double rho) {
  ConditionResiduals r;
  const double cost = s.telehealth_price * s.telehealth_input + s.inperson_price * s.inperson_input;
  r.full_price = rel(s.full_price, cost / s.quantity);
  r.final_demand = rel(s.quantity, p.demand.quantity(s.full_price, gamma));
  r.production = rel(s.quantity, p.production.output(s.telehealth_input, s.inperson_input));
  r.inperson_supply = rel(s.inperson_price, marginal_input_price(p.inperson_supply,
                                                                 s.inperson_input));
  r.telehealth_supply = rel(s.telehealth_price, marginal_input_price(p.telehealth_supply,
                                                                     s.telehealth_input));
  r.cost_minimization = rel(p.production.mrts(s.telehealth_input, s.inperson_input),
                            s.telehealth_price / s.inperson_price);
  r.price_compliance = rho > 0.0 ? rel(s.telehealth_unit_revenue(), rho) : 0.0;
  return r;
}

Equilibrium cost_minimizing_supply_point(const MarketPrimitives& p, double t) {
  if (!(t > 0.0)) throw DomainError("cost_minimizing_supply_point: T must be > 0");
  const auto& prod = p.production;
  const double r = prod.is_cobb_douglas() ? 0.0 : prod.ces_exponent();
  const double k_t = p.telehealth_supply.cost_elasticity();
  const double k_i = p.inperson_supply.cost_elasticity();
  const double log_i = (std::log(p.telehealth_supply.scale / p.inperson_supply.scale) -
                        std::log(prod.share / (1.0 - prod.share)) +
                        (k_t + 1.0 - r) * std::log(t)) /
                       (1.0 - r + k_i);
  const double i = std::exp(log_i);
  return finish_point(p, t, i, prod.output(t, i));
}

std::optional<Equilibrium> compliant_supply_point(const MarketPrimitives& p, double rho,
                                                  double t) {
  if (!(t > 0.0) || !(rho > 0.0)) return std::nullopt;
  const auto& prod = p.production;
  const double y = marginal_input_price(p.telehealth_supply, t) * t / rho;
  const double scaled = y / prod.tfp;
  double i = 0.0;
  if (prod.is_cobb_douglas()) {
    i = std::exp((std::log(scaled) - prod.share * std::log(t)) / (1.0 - prod.share));
  } else {
    const double r = prod.ces_exponent();
    const double v = (std::pow(scaled, r) - prod.share * std::pow(t, r)) / (1.0 - prod.share);
    if (!(v > 0.0) || !std::isfinite(v)) return std::nullopt;
    i = std::pow(v, 1.0 / r);
  }
  if (!(i > 0.0) || !std::isfinite(i)) return std::nullopt;
  Equilibrium e = finish_point(p, t, i, y);
  if (!finite_positive(e)) return std::nullopt;
  return e;
}

Equilibrium solve_cost_minimizing(const MarketPrimitives& p, double gamma,
                                  const SolverOptions& o) {
  p.validate();
  const Residual f = [&](double x) -> std::optional<double> {
    return excess_supply(p, cost_minimizing_supply_point(p, std::exp(x)), gamma);
  };
  const double x = find_log_root(f, o, "solve_cost_minimizing");
  Equilibrium e = cost_minimizing_supply_point(p, std::exp(x));
  check_converged(condition_residuals(p, e, gamma, 0.0), false, o, "solve_cost_minimizing");
  return e;
}

Equilibrium solve_unregulated(const MarketPrimitives& p, const SolverOptions& o) {
  return solve_cost_minimizing(p, 0.0, o);
}

Equilibrium solve_price_constrained(const MarketPrimitives& p, double rho, double gamma,
                                    const SolverOptions& o) {
  p.validate();
  if (!(rho > 0.0)) throw ConfigError("solve_price_constrained: rho must be > 0");
  const Residual f = [&](double x) -> std::optional<double> {
    const auto point = compliant_supply_point(p, rho, std::exp(x));
    if (!point) return std::nullopt;
    return excess_supply(p, *point, gamma);
  };
  const double x = find_log_root(f, o, "solve_price_constrained");
  const auto e = compliant_supply_point(p, rho, std::exp(x));
  if (!e) {
    throw InfeasibleRegime("solve_price_constrained: root lies on the feasibility edge", {});
  }
  check_converged(condition_residuals(p, *e, gamma, rho), true, o, "solve_price_constrained");
  return *e;
}

Equilibrium solve_regulated(const MarketPrimitives& p, const PolicyRegime& regime,
                            const SolverOptions& o) {
  regime.validate();
  const double gamma = regime.gamma();
  Equilibrium base = solve_cost_minimizing(p, gamma, o);
  if (!regime.has_price_control() || !regime.binds(base.telehealth_unit_revenue())) return base;
  return solve_price_constrained(p, regime.rho, gamma, o);
}

Equilibrium supply_point_at_unit_revenue(const MarketPrimitives& p, double rho,
                                         const SolverOptions& o) {
  p.validate();
  if (!(rho > 0.0)) throw ConfigError("supply_point_at_unit_revenue: rho must be > 0");
  const Residual f = [&](double x) -> std::optional<double> {
    const Equilibrium e = cost_minimizing_supply_point(p, std::exp(x));
    if (!finite_positive(e)) return std::nullopt;
    return std::log(e.telehealth_unit_revenue()) - std::log(rho);
  };
  const double x = find_log_root(f, o, "supply_point_at_unit_revenue");
  return cost_minimizing_supply_point(p, std::exp(x));
}

}  // namespace tpreg::equilibrium
