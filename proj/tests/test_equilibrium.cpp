#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles/market_oracle.hpp"
#include "tpreg/equilibrium/comparative.hpp"
#include "tpreg/equilibrium/config.hpp"
#include "tpreg/equilibrium/demand.hpp"
#include "tpreg/equilibrium/elasticity.hpp"
#include "tpreg/equilibrium/primitives.hpp"
#include "tpreg/equilibrium/solver.hpp"
#include "tpreg/errors.hpp"

using namespace tpreg;
using namespace tpreg::equilibrium;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

MarketPrimitives base_market(double e_t = 2.0, double e_i = 1.0, double sigma = 0.8) {
  MarketPrimitives m;
  m.telehealth_supply = {e_t, 1.0};
  m.inperson_supply = {e_i, 1.0};
  m.production = {1.0, 0.5, sigma};
  return m;
}

// A market whose clearing full price exceeds 1, so that a more elastic
// demand curve lowers the quantity demanded at that price.
MarketPrimitives pricey_market() {
  MarketPrimitives m = base_market();
  m.telehealth_supply.scale = 3.0;
  m.inperson_supply.scale = 3.0;
  m.demand.demand_shift = 2.0;
  return m;
}

MarketPrimitives random_market(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> el(0.4, 4.0), share(0.2, 0.8), sig(0.4, 2.5),
      scale(0.5, 2.0), shift(0.5, 3.0);
  MarketPrimitives m;
  m.telehealth_supply = {el(rng), scale(rng)};
  m.inperson_supply = {el(rng), scale(rng)};
  m.production = {1.0, share(rng), sig(rng)};
  m.demand.demand_shift = shift(rng);
  return m;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("marginal input price is isoelastic", "[primitives]") {
  CHECK(marginal_input_price({1.0, 1.0}, 1.0) == 1.0);
  CHECK_THAT(marginal_input_price({2.0, 3.0}, 4.0), WithinRel(6.0, 1e-15));
  CHECK_THAT(marginal_input_price({0.5, 1.0}, 9.0), WithinRel(81.0, 1e-14));
  CHECK_THROWS_AS(marginal_input_price({1.0, 1.0}, 0.0), DomainError);
  CHECK_THROWS_AS(marginal_input_price({1.0, 1.0}, -2.0), DomainError);
  CHECK(marginal_input_price({1.5, 2.0}, 3.0) < marginal_input_price({1.5, 2.0}, 3.1));
}

TEST_CASE("cost shares close to one", "[elasticity]") {
  auto s = cost_shares(1, 1, 1, 1);
  CHECK(s.telehealth == 0.5);
  CHECK(s.inperson == 0.5);
  s = cost_shares(2, 3, 1, 4);
  CHECK_THAT(s.telehealth, WithinAbs(0.6, 1e-15));
  CHECK_THAT(s.inperson, WithinAbs(0.4, 1e-15));
  s = cost_shares(1, 0.0001, 100, 100);
  CHECK(s.telehealth < 1e-7);
  CHECK_THAT(s.inperson, WithinAbs(1.0, 1e-7));
  CHECK_THROWS_AS(cost_shares(0, 1, 1, 1), DomainError);
  CHECK_THROWS_AS(cost_shares(1, 1, 1, -1), DomainError);

  std::mt19937_64 rng(11);
  std::lognormal_distribution<double> d(0.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const auto c = cost_shares(d(rng), d(rng), d(rng), d(rng));
    CHECK(c.telehealth + c.inperson == 1.0);
  }
}

TEST_CASE("unregulated supply elasticity", "[elasticity]") {
  CHECK_THAT(eta_unregulated(0.5, 1.0, 2.0, 1.0), WithinAbs(0.714286, 5e-7));
  CHECK_THAT(eta_unregulated(0.5, 1.0, 2.0, 2.0), WithinAbs(0.5, 1e-15));
  CHECK_THAT(input_response_ratio(1.0, 2.0, 1.0), WithinAbs(1.5, 1e-15));
  CHECK_THROWS_AS(eta_unregulated(0.0, 1.0, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(eta_unregulated(0.5, 1.0, -2.0, 1.0), DomainError);
}

TEST_CASE("unregulated elasticity matches the re-solved market at s_I = 0.3", "[elasticity][oracle]") {
  // Cost elasticities 3 and 0.5 are supply elasticities 1/3 and 2. The CES
  // weight is tuned by bisection until the solved in-person share is 0.3.
  MarketPrimitives m = base_market(1.0 / 3.0, 2.0, 0.8);
  auto share_i = [&](double a) {
    m.production.share = a;
    const auto e = solve_unregulated(m);
    return e.inperson_cost_share();
  };
  double lo = 0.01, hi = 0.99;
  const bool decreasing = share_i(lo) > share_i(hi);
  for (int k = 0; k < 80; ++k) {
    const double mid = 0.5 * (lo + hi);
    if ((share_i(mid) > 0.3) == decreasing) lo = mid; else hi = mid;
  }
  const double s_i = share_i(0.5 * (lo + hi));
  REQUIRE_THAT(s_i, WithinAbs(0.3, 1e-9));
  const double formula = eta_unregulated(0.3, 0.8, 3.0, 0.5);
  const double fd = local_supply_elasticity(m, PolicyRegime::none(), 1e-4);
  CHECK(rel_diff(fd, formula) < 1e-6);
}

TEST_CASE("regulated supply elasticity", "[elasticity]") {
  // Published form.
  CHECK_THAT(eta_regulated_printed(0.5, 2.0, 1.0), WithinAbs(0.428571, 5e-7));
  CHECK_THAT(eta_regulated_printed(0.5, 2.0, 2.0), WithinAbs(0.25, 1e-15));
  CHECK_THAT(eta_regulated_printed(0.9, 1.0, 1.0), WithinAbs(0.9, 1e-15));
  // Form consistent with the compliance-constrained supply curve: it
  // reduces to 1/eps when both inputs share eps.
  CHECK_THAT(eta_regulated(0.5, 2.0, 2.0), WithinAbs(0.5, 1e-15));
  CHECK_THAT(eta_regulated(0.5, 2.0, 1.0), WithinAbs(1.5 / 1.75, 1e-15));
  CHECK_THAT(eta_regulated(0.9, 1.0, 1.0), WithinAbs(1.0, 1e-15));
  for (double s : {0.1, 0.4, 0.8}) {
    CHECK_THAT(eta_regulated_printed(s, 1.7, 0.6), WithinRel(s * eta_regulated(s, 1.7, 0.6), 1e-14));
  }
  CHECK_THROWS_AS(eta_regulated(1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(eta_regulated_printed(0.5, 0.0, 1.0), DomainError);
}

TEST_CASE("eta_difference reports direct and factorized forms", "[elasticity]") {
  // Brute-force aggregates: A = s_T + s_I a, B = s_T eps_T + s_I a eps_I,
  // C = 1 + eps_T (C' = s_I C in the published form), D = eps_T (1 - s_I + eps_I) + eps_I s_I.
  auto aggregates = [](double s_i, double sigma, double et, double ei) {
    const double s_t = 1.0 - s_i;
    const double a = (1.0 + sigma * et) / (1.0 + sigma * ei);
    struct { double A, B, C, D; } g{s_t + s_i * a, s_t * et + s_i * a * ei, 1.0 + et,
                                   et * (1.0 - s_i + ei) + ei * s_i};
    return g;
  };

  auto r = eta_difference(0.5, 1.0, 2.0, 1.0);
  {
    const auto g = aggregates(0.5, 1.0, 2.0, 1.0);
    const double ad_bc = g.A * g.D - g.B * (0.5 * g.C);
    CHECK_THAT(ad_bc, WithinAbs(1.75, 1e-12));
    CHECK_THAT(g.B * g.D, WithinAbs(6.125, 1e-12));
    CHECK_THAT(r.diff_direct_printed, WithinAbs(0.285714, 5e-7));
    CHECK_THAT(r.diff_direct, WithinAbs(g.A / g.B - g.C / g.D, 1e-14));
  }
  CHECK(r.s_t + r.s_i == 1.0);
  CHECK_THAT(r.alpha, WithinAbs(1.5, 1e-15));

  r = eta_difference(0.5, 1.0, 2.0, 2.0);
  CHECK_THAT(r.diff_direct_printed, WithinAbs(0.25, 1e-14));
  CHECK_THAT(r.diff_factorized, WithinAbs(0.0, 1e-15));
  CHECK_THAT(r.diff_direct, WithinAbs(0.0, 1e-14));
  CHECK(r.sign_matches);
  CHECK_FALSE(r.sign_matches_printed);

  r = eta_difference(0.5, 1.0, 1.0, 2.0);
  {
    const auto g = aggregates(0.5, 1.0, 1.0, 2.0);
    CHECK_THAT(r.diff_direct, WithinAbs(g.A / g.B - g.C / g.D, 1e-14));
    CHECK_THAT(r.diff_direct_printed, WithinAbs(g.A / g.B - 0.5 * g.C / g.D, 1e-14));
  }
  // Consistent forms put the difference on the side of the supply
  // elasticities: here telehealth supply (1/eps_T) is the more elastic one.
  CHECK(r.diff_direct > 0.0);
  CHECK(r.diff_factorized < 0.0);
  CHECK_FALSE(r.sign_matches);
  CHECK(r.sign_matches_supply);

  CHECK_THROWS_AS(eta_difference(0.5, 2.0, 1.0, 1.0), AssumptionViolation);
  CHECK_THROWS_AS(eta_difference(0.6, 2.0, 1.0, 1.0), AssumptionViolation);
}

TEST_CASE("difference signs over random draws", "[elasticity][property]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> s(0.02, 0.98), e(0.05, 6.0);
  int factorized_agrees = 0;
  for (int k = 0; k < 2000; ++k) {
    const double s_i = s(rng);
    const double sigma = std::uniform_real_distribution<double>(0.05, 0.999 / s_i)(rng);
    const double et = e(rng), ei = e(rng);
    const auto r = eta_difference(s_i, sigma, et, ei);
    CHECK(r.sign_matches_supply);
    CHECK(sign_of(r.diff_factorized) == sign_of(et - ei, 0.0));
    factorized_agrees += sign_of(r.diff_factorized) == sign_of(r.diff_direct);
  }
  CHECK(factorized_agrees == 0);
}

TEST_CASE("rotation direction over random draws", "[elasticity][property]") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> s(0.05, 0.95), e(0.1, 5.0);
  int pass_gt = 0, n_gt = 0, pass_lt = 0, n_lt = 0, printed_pass = 0;
  while (n_gt < 200 || n_lt < 200) {
    const double s_i = s(rng);
    const double sigma = std::uniform_real_distribution<double>(0.05, 0.99 / s_i)(rng);
    const double et = e(rng), ei = e(rng);
    const auto r = eta_difference(s_i, sigma, et, ei);
    if (et > ei && n_gt < 200) {
      ++n_gt;
      pass_gt += r.diff_direct < 0.0;
      printed_pass += r.sign_matches_printed;
    } else if (et < ei && n_lt < 200) {
      ++n_lt;
      pass_lt += r.diff_direct > 0.0;
      printed_pass += r.sign_matches_printed;
    }
  }
  INFO("published-form sign agreement: " << printed_pass << " / 400");
  CHECK(pass_gt == 200);
  CHECK(pass_lt == 200);
  CHECK(printed_pass < 400);
}

TEST_CASE("demand elasticity law", "[demand]") {
  CHECK_THAT(demand_eta(0, 0, 0.5, 0.1, 0.3), WithinAbs(0.5, 1e-15));
  CHECK_THAT(demand_eta(1, 1, 0.5, 0.1, 0.3), WithinAbs(0.3, 1e-15));
  CHECK_THAT(demand_eta(1, 0.5, 0.5, 0.1, 0.3), WithinAbs(0.45, 1e-15));
  CHECK_THROWS_AS(demand_eta(10, 1, 0.5, 0.1, 0.3), DomainError);   // negative
  CHECK_THROWS_AS(demand_eta(10, 0, 0.5, 0.1, 0.3), DomainError);   // above one
  CHECK_THROWS_AS(demand_eta(0, 0, 0.5, 0.3, 0.1), DomainError);    // eta2 <= eta1

  CHECK_THAT(demand_quantity(1, 0, 0, 0.5, 1), WithinAbs(1.0, 1e-15));
  CHECK_THAT(demand_quantity(4, 0, 0, 0.5, 1), WithinAbs(0.0625, 1e-15));
  CHECK_THAT(demand_quantity(2, 1, 2, 0.5, 3), WithinAbs(0.1875, 1e-15));
  CHECK_THROWS_AS(demand_quantity(0, 0, 0, 0.5, 1), DomainError);

  // Log-log slope equals -1/eta.
  for (double eta : {0.2, 0.5, 0.9}) {
    const double p = 1.7, h = 1e-5;
    const double slope = (std::log(demand_quantity(p * std::exp(h), 0, 0, eta, 2)) -
                          std::log(demand_quantity(p * std::exp(-h), 0, 0, eta, 2))) / (2 * h);
    CHECK_THAT(slope, WithinAbs(-1.0 / eta, 1e-6));
  }
}

TEST_CASE("full price decomposition", "[primitives]") {
  FullPriceSpec s;
  s.annual_deductible = 100;
  s.fixed_copay = 5;
  s.service_cost = 50;
  s.premium = 200;
  auto fp = full_price(s, 10);
  CHECK_THAT(fp.out_of_pocket, WithinAbs(25, 1e-12));
  CHECK_THAT(fp.full_price, WithinAbs(45, 1e-12));

  FullPriceSpec zero;
  zero.coinsurance_rate = 0.2;
  fp = full_price(zero, 1);
  CHECK(fp.out_of_pocket == 0.0);
  CHECK(fp.full_price == 0.0);

  FullPriceSpec coins;
  coins.service_cost = 100;
  for (double y : {0.5, 3.0, 77.0}) CHECK_THAT(full_price(coins, y).out_of_pocket, WithinAbs(20, 1e-12));
  CHECK_THROWS_AS(full_price(coins, 0.0), DomainError);
}

TEST_CASE("B1 and B2 orderings", "[demand]") {
  CHECK(b1_elasticity_order(2, 3, 6) == ElasticityOrder::Equal);
  CHECK(b1_elasticity_order(10, 1, 5) == ElasticityOrder::TimeGreater);
  CHECK(b1_elasticity_order(1, 1, 5) == ElasticityOrder::MoneyGreater);
  CHECK_THROWS_AS(b1_elasticity_order(0, 1, 0), DomainError);

  CHECK(b2_substitution_sign(1, 2, 1, 1, 2) == SubstitutionSign::Positive);
  CHECK(b2_substitution_sign(1, 1, 1, 1, 1) == SubstitutionSign::Zero);
  CHECK(b2_substitution_sign(1, 0, 1, 1, 0.01) == SubstitutionSign::Negative);
  CHECK_THROWS_AS(b2_substitution_sign(1, 0, 0, 1, 1), DomainError);

  // B1 against numerical elasticities of the closed-form demand.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int k = 0; k < 200; ++k) {
    const double w = u(rng), tau = u(rng), p = u(rng), eta = 0.6, h = 1e-6;
    auto lq = [&](double pp, double tt) { return std::log(demand_quantity(pp, w, tt, eta, 1.0)); };
    const double e_time = std::abs((lq(p, tau * (1 + h)) - lq(p, tau * (1 - h))) / (2 * h));
    const double e_money = std::abs((lq(p * (1 + h), tau) - lq(p * (1 - h), tau)) / (2 * h));
    const auto order = b1_elasticity_order(w, tau, p);
    if (std::abs(e_time - e_money) < 1e-6) continue;
    CHECK((order == ElasticityOrder::TimeGreater) == (e_time > e_money));
  }
}

TEST_CASE("unregulated equilibrium", "[solver]") {
  SECTION("symmetric primitives give equal inputs") {
    MarketPrimitives m = base_market(1.5, 1.5, 1.0);
    const auto e = solve_unregulated(m);
    CHECK_THAT(e.telehealth_input, WithinRel(e.inperson_input, 1e-10));
  }
  SECTION("matches the output-parametrized oracle") {
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 8; ++k) {
      const MarketPrimitives m = random_market(rng);
      const auto e = solve_unregulated(m);
      const auto o = oracle::clear_market(m, 0.0, 0.0);
      REQUIRE(o.has_value());
      CHECK(rel_diff(e.quantity, o->y) < 1e-4);
      CHECK(rel_diff(e.telehealth_input, o->t) < 1e-4);
      CHECK(rel_diff(e.inperson_input, o->i) < 1e-4);
      CHECK(rel_diff(e.full_price, o->price) < 1e-4);
      // Zero profit and the production function.
      CHECK(std::abs(e.full_price * e.quantity - e.telehealth_price * e.telehealth_input -
                     e.inperson_price * e.inperson_input) < 1e-8 * e.full_price * e.quantity);
      CHECK(rel_diff(m.production.output(e.telehealth_input, e.inperson_input), e.quantity) < 1e-9);
      CHECK(condition_residuals(m, e, 0.0, 0.0).max_unregulated_supply() < 1e-9);
    }
  }
  SECTION("more demand never lowers output") {
    MarketPrimitives m = base_market();
    const double y0 = solve_unregulated(m).quantity;
    m.demand.demand_shift *= 2.0;
    CHECK(solve_unregulated(m).quantity >= y0);
  }
}

TEST_CASE("regulated equilibrium", "[solver]") {
  const MarketPrimitives m = base_market();
  const auto unreg = solve_unregulated(m);

  SECTION("no regime is the unregulated solution") {
    const auto e = solve_regulated(m, PolicyRegime::none());
    CHECK(e.quantity == unreg.quantity);
    CHECK(e.telehealth_input == unreg.telehealth_input);
    CHECK(equilibrium_shift(m, PolicyRegime::none()) == 0.0);
  }
  SECTION("binding floor with the more elastic telehealth input raises output") {
    const double rho = 1.2 * unreg.telehealth_unit_revenue();
    const auto e = solve_regulated(m, PolicyRegime::price_floor(rho));
    CHECK(e.quantity > unreg.quantity);
    CHECK_THAT(e.telehealth_unit_revenue(), WithinRel(rho, 1e-9));
    const auto o = oracle::clear_market(m, rho, 0.0);
    REQUIRE(o.has_value());
    CHECK(rel_diff(e.quantity, o->y) < 1e-4);
    CHECK(equilibrium_shift(m, PolicyRegime::price_floor(rho)) > 0.0);
  }
  SECTION("non-binding controls leave the market alone") {
    const double r0 = unreg.telehealth_unit_revenue();
    CHECK(solve_regulated(m, PolicyRegime::price_floor(0.8 * r0)).quantity == unreg.quantity);
    CHECK(solve_regulated(m, PolicyRegime::price_ceiling(1.2 * r0)).quantity == unreg.quantity);
    CHECK(solve_regulated(m, PolicyRegime::price_ceiling(0.8 * r0)).quantity != unreg.quantity);
  }
  SECTION("cost parity lowers output once broadband is high") {
    for (double b : {1.0, 2.0, 4.0}) {
      MarketPrimitives p = pricey_market();
      p.demand.broadband_z = b;
      const auto none = solve_regulated(p, PolicyRegime::none());
      const auto parity = solve_regulated(p, PolicyRegime::cost_parity());
      CHECK(parity.quantity < none.quantity);
      const auto o = oracle::clear_market(p, 0.0, 1.0);
      REQUIRE(o.has_value());
      CHECK(rel_diff(parity.quantity, o->y) < 1e-4);
    }
  }
  SECTION("infeasible compliance and missing brackets are reported") {
    SolverOptions narrow;
    narrow.lower = 1e3;
    narrow.upper = 1e4;
    CHECK_THROWS_AS(solve_unregulated(m, narrow), BracketError);
    CHECK_THROWS_AS(solve_price_constrained(m, 1e-30, 0.0, narrow), ConvergenceError);
  }
}

TEST_CASE("cost parity shifts are negative and deepen with broadband", "[comparative]") {
  MarketPrimitives p = pricey_market();
  double previous = 0.0;
  for (double b : {1.0, 2.0, 4.0, 6.0, 8.0}) {
    p.demand.broadband_z = b;
    const double shift = equilibrium_shift(p, PolicyRegime::cost_parity());
    CHECK(shift < 0.0);
    if (b > 1.0) CHECK(shift < previous);
    previous = shift;
  }
}

TEST_CASE("cost-parity output is non-increasing in broadband and ceilings fade as gamma shrinks", "[comparative][property]") {
  MarketPrimitives p = pricey_market();
  p.demand.eta1 = 0.01;
  p.demand.eta2 = 0.04;
  double prev = std::numeric_limits<double>::infinity();
  for (double b = 1.0; b <= 12.0; b += 0.5) {
    p.demand.broadband_z = b;
    const double y = solve_regulated(p, PolicyRegime::cost_parity()).quantity;
    CHECK(y <= prev);
    prev = y;
  }
  p.demand.broadband_z = 4.0;
  const double y0 = solve_regulated(p, PolicyRegime::none()).quantity;
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double g : {0.5, 0.25, 0.1, 0.01, 0.001}) {
    const double gap = std::abs(solve_regulated(p, PolicyRegime::cost_ceiling(g)).quantity - y0);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("E(rho) satisfies both condition sets", "[solver][property]") {
  const MarketPrimitives m = base_market();
  const auto unreg = solve_unregulated(m);
  for (double f : {0.7, 1.0, 1.3}) {
    const double rho = f * unreg.telehealth_unit_revenue();
    const auto e = supply_point_at_unit_revenue(m, rho);
    const auto r = condition_residuals(m, e, 0.0, rho);
    CHECK(r.max_unregulated_supply() < 1e-9);
    CHECK(r.max_regulated_supply() < 1e-9);
  }
}

TEST_CASE("shocks under a binding floor", "[comparative]") {
  CHECK(apply_shocks(base_market(), 0.0, 0.0).production.tfp == base_market().production.tfp);
  CHECK(apply_shocks(base_market(), 0.0, 0.0).demand.demand_shift == base_market().demand.demand_shift);
  CHECK_THROWS_AS(apply_shocks(base_market(), -1.0, 0.0), DomainError);
  CHECK_THROWS_AS(apply_shocks(base_market(), 0.0, -1.5), DomainError);

  SECTION("demand shock raises output and keeps the compliance ratio") {
    const MarketPrimitives m = base_market();
    const double rho = 1.2 * solve_unregulated(m).telehealth_unit_revenue();
    const auto regime = PolicyRegime::price_floor(rho);
    const auto before = solve_regulated(m, regime);
    const auto after = solve_regulated(apply_shocks(m, 0.0, 0.1), regime);
    CHECK(after.quantity > before.quantity);
    CHECK_THAT(after.telehealth_unit_revenue(), WithinRel(rho, 1e-9));
  }
  SECTION("productivity shock raises output, lowers the full price, keeps the ratio") {
    for (const auto& m : {base_market(2.0, 1.0, 0.8), base_market(1.0, 2.0, 1.3)}) {
      const double r0 = solve_unregulated(m).telehealth_unit_revenue();
      for (const auto& regime : {PolicyRegime::price_floor(1.2 * r0), PolicyRegime::price_ceiling(0.8 * r0)}) {
        const auto before = solve_regulated(m, regime);
        const auto after = solve_regulated(apply_shocks(m, 0.1, 0.0), regime);
        CHECK(after.quantity > before.quantity);
        CHECK(after.full_price < before.full_price);
        CHECK_THAT(after.telehealth_unit_revenue(), WithinRel(regime.rho, 1e-9));
      }
    }
  }
}

TEST_CASE("local supply elasticity", "[comparative][oracle]") {
  SECTION("common input elasticity gives 1/eps in cost terms") {
    const MarketPrimitives m = base_market(1.5, 1.5, 1.0);
    CHECK(rel_diff(local_supply_elasticity(m, PolicyRegime::none(), 1e-4), 1.5) < 1e-3);
  }
  SECTION("a just-binding floor follows the regulated formula") {
    // At rho equal to the unregulated unit revenue, output elasticities equal
    // cost shares, which is where the closed form applies.
    const MarketPrimitives m = base_market(2.0, 1.0, 0.8);
    const auto unreg = solve_unregulated(m);
    const auto regime = PolicyRegime::price_floor(unreg.telehealth_unit_revenue() * (1.0 + 1e-12));
    const double fd = local_supply_elasticity(m, regime, 1e-4);
    CHECK(rel_diff(fd, eta_regulated(unreg.inperson_cost_share(), 0.5, 1.0)) < 1e-6);
    CHECK(rel_diff(fd, eta_regulated_printed(unreg.inperson_cost_share(), 0.5, 1.0)) > 0.1);
  }
  SECTION("a strictly binding floor follows the general compliance curve") {
    const MarketPrimitives m = base_market(2.0, 1.0, 0.8);
    const double rho = 1.2 * solve_unregulated(m).telehealth_unit_revenue();
    const auto regime = PolicyRegime::price_floor(rho);
    const auto e = solve_regulated(m, regime);
    const double h = 1e-6;
    const double theta_t = (std::log(m.production.output(e.telehealth_input * std::exp(h), e.inperson_input)) -
                            std::log(m.production.output(e.telehealth_input * std::exp(-h), e.inperson_input))) / (2 * h);
    const double theta_i = 1.0 - theta_t;  // constant returns
    REQUIRE(std::abs(theta_t - e.telehealth_cost_share()) > 0.01);
    const double et = 0.5, ei = 1.0, s_i = e.inperson_cost_share();
    const double p_over_y = s_i * ((1.0 + ei) * (1.0 + et - theta_t) / (theta_i * (1.0 + et)) - 1.0);
    CHECK(rel_diff(local_supply_elasticity(m, regime, 1e-4), 1.0 / p_over_y) < 1e-6);
  }
  SECTION("central differences converge at second order") {
    const MarketPrimitives m = base_market(2.0, 1.0, 0.8);
    const auto e = solve_unregulated(m);
    const double exact = eta_unregulated(e.inperson_cost_share(), 0.8, 0.5, 1.0);
    const double err1 = std::abs(local_supply_elasticity(m, PolicyRegime::none(), 0.04) - exact);
    const double err2 = std::abs(local_supply_elasticity(m, PolicyRegime::none(), 0.02) - exact);
    CHECK(err2 < err1);
    CHECK(err1 / err2 > 3.0);
    CHECK(err1 / err2 < 5.0);
  }
  CHECK_THROWS_AS(local_supply_elasticity(base_market(), PolicyRegime::none(), 0.0), DomainError);
}

TEST_CASE("sweep configuration and CSV", "[config]") {
  const auto j = nlohmann::json::parse(R"({
    "primitives": {"telehealth_supply": {"elasticity": 2}, "production": {"substitution": 0.8}},
    "regimes": [{"price": "floor", "rho": 0.6}, {"cost": "parity"}],
    "broadband_grid": [0, 1, 2],
    "broadband_link": {"telehealth_elasticity_gain": 0.1}
  })");
  const SweepSpec spec = sweep_from_json(j);
  CHECK(spec.regimes.size() == 2);
  CHECK(spec.broadband_grid.size() == 3);
  const auto rows = run_sweep(spec);
  CHECK(rows.size() == 6);
  std::ostringstream out;
  write_sweep_csv(out, rows);
  const std::string text = out.str();
  CHECK(text.rfind("regime,broadband_z,Y_unreg,Y_reg,shift,eta_unreg,eta_reg,diff_direct,diff_factorized,sign_ok\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
  for (const auto& r : rows) CHECK_THAT(r.shift, WithinAbs(r.y_reg - r.y_unreg, 1e-15));

  CHECK_THROWS_AS(sweep_from_json(nlohmann::json::parse(R"({"primitives": {"bogus": 1}})")), ConfigError);
  CHECK_THROWS_AS(regime_from_json(nlohmann::json::parse(R"({"price": "floor"})")), ConfigError);
  CHECK_THROWS_AS(regime_from_json(nlohmann::json::parse(R"({"cost": "ceiling", "gamma_cc": 1.5})")), ConfigError);
}
