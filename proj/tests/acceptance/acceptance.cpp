// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Usage: acceptance [log_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "oracles/dense_ppml.hpp"
#include "tpreg/causal/design.hpp"
#include "tpreg/causal/effects.hpp"
#include "tpreg/equilibrium/comparative.hpp"
#include "tpreg/equilibrium/elasticity.hpp"
#include "tpreg/equilibrium/solver.hpp"
#include "tpreg/pipeline/studies.hpp"
#include "tpreg/ppml/fit.hpp"
#include "tpreg/synth/dgp.hpp"

using namespace tpreg;

namespace {

// Pinned tolerances and thresholds.
constexpr double kAc1RelTol = 1e-3;
constexpr int kAc1Draws = 500;
constexpr double kAc1Bump = 1e-4;
constexpr int kAc2Draws = 500;
constexpr double kAc3AbsTol = 0.002;
constexpr double kAc4GapTol = 0.001;
constexpr int kAc5Panels = 50;
constexpr std::size_t kAc5MaxRows = 200;
constexpr double kAc5CoefTol = 1e-8;
constexpr double kAc5VcovTol = 1e-6;
constexpr std::size_t kAc6Reps = 200;
constexpr double kAc6MaxBiasInSe = 0.1;
constexpr double kAc6CoverageLow = 0.90;
constexpr double kAc6CoverageHigh = 0.98;
constexpr std::size_t kAc7ResetReps = 400;
constexpr double kAc7ResetLow = 0.025;
constexpr double kAc7ResetHigh = 0.075;
constexpr std::size_t kAc7PlaceboReps = 200;
constexpr std::size_t kAc7EventReps = 200;
constexpr double kAc7MaxRate = 0.10;
constexpr std::size_t kAc8Reps = 100;
constexpr double kAc8MinPassRate = 0.90;
constexpr double kAc9Tol = 1e-10;

std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

equilibrium::MarketPrimitives random_market(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> el(0.4, 4.0), share(0.2, 0.8), sig(0.4, 2.5),
      scale(0.5, 2.0), shift(0.5, 3.0);
  equilibrium::MarketPrimitives m;
  m.telehealth_supply = {el(rng), scale(rng)};
  m.inperson_supply = {el(rng), scale(rng)};
  m.production = {1.0, share(rng), sig(rng)};
  m.demand.demand_shift = shift(rng);
  return m;
}

Outcome ac1() {
  using namespace equilibrium;
  std::mt19937_64 rng(101);
  int done = 0, rejected = 0, bad_unreg = 0, bad_reg = 0;
  double worst_unreg = 0.0, worst_reg = 0.0;
  while (done < kAc1Draws) {
    const MarketPrimitives m = random_market(rng);
    double fd_u = 0.0, fd_r = 0.0;
    Equilibrium e;
    try {
      m.validate();
      e = solve_unregulated(m);
      fd_u = local_supply_elasticity(m, PolicyRegime::none(), kAc1Bump);
      // Demand through E(rho): the floor just binds at the unregulated point.
      const auto floor = PolicyRegime::price_floor(e.telehealth_unit_revenue() * (1.0 + 1e-12));
      fd_r = local_supply_elasticity(m, floor, kAc1Bump);
    } catch (const std::exception&) {
      ++rejected;
      continue;
    }
    const double s_i = e.inperson_cost_share();
    const double et = m.telehealth_supply.cost_elasticity(), ei = m.inperson_supply.cost_elasticity();
    const double du = rel_diff(fd_u, eta_unregulated(s_i, m.production.substitution, et, ei));
    const double dr = rel_diff(fd_r, eta_regulated(s_i, et, ei));
    worst_unreg = std::max(worst_unreg, du);
    worst_reg = std::max(worst_reg, dr);
    bad_unreg += du > kAc1RelTol;
    bad_reg += dr > kAc1RelTol;
    ++done;
  }
  return {bad_unreg == 0 && bad_reg == 0,
          fmt("%d draws (%d invalid redrawn); max rel err unreg %.2e, reg %.2e; misses %d/%d (tol %.0e)",
              done, rejected, worst_unreg, worst_reg, bad_unreg, bad_reg, kAc1RelTol)};
}

Outcome ac2(const std::filesystem::path& log_dir) {
  using namespace equilibrium;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> share(0.05, 0.95), sig(0.2, 3.0), el(0.2, 5.0);
  const auto log_path = log_dir / "ac2_disagreements.csv";
  std::ofstream log(log_path);
  log << "draw,s_i,sigma,supply_elasticity_t,supply_elasticity_i,diff_direct,diff_direct_printed,"
         "diff_factorized\n";
  int per_stratum[2] = {0, 0};
  int n = 0, match_supply = 0, match_cost = 0, match_printed = 0, factor_agrees = 0, disagreements = 0;
  while (n < kAc2Draws) {
    const double s_i = share(rng), sigma = sig(rng), st = el(rng), si = el(rng);
    if (sigma * s_i >= 1.0 || st == si) continue;
    const int stratum = st > si ? 1 : 0;
    if (per_stratum[stratum] >= kAc2Draws / 2) continue;
    ++per_stratum[stratum];
    const auto d = eta_difference(s_i, sigma, 1.0 / st, 1.0 / si);
    match_supply += d.sign_matches_supply;
    match_cost += d.sign_matches;
    match_printed += d.sign_matches_printed;
    if (sign_of(d.diff_direct) == sign_of(d.diff_factorized)) {
      ++factor_agrees;
    } else {
      ++disagreements;
      log << n << ',' << fmt("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", s_i, sigma, st, si, d.diff_direct,
                             d.diff_direct_printed, d.diff_factorized)
          << '\n';
    }
    ++n;
  }
  log.close();
  const bool complete = n == kAc2Draws && per_stratum[0] == per_stratum[1] && static_cast<bool>(log);
  return {complete,
          fmt("%d draws (%d/%d by supply order); sign(direct) follows supply order %.3f, cost order %.3f; "
              "printed follows supply order %.3f; factorized agrees with direct %.3f; %d disagreements "
              "logged to %s",
              n, per_stratum[1], per_stratum[0], match_supply / double(n), match_cost / double(n),
              match_printed / double(n), factor_agrees / double(n), disagreements, log_path.c_str())};
}

Outcome ac3() {
  struct Row {
    const char* name;
    double att0, att1;
    std::vector<std::pair<double, double>> targets;
  };
  const std::vector<Row> rows = {
      {"floor", -0.0058, 0.0273, {{2, 0.0614}, {4, 0.1332}, {8, 0.2916}, {12, 0.4721}}},
      {"ceiling", -0.0577, -0.0238, {{2, 0.0113}, {12, 0.4403}}}};
  bool pass = true;
  std::string detail;
  for (const auto& r : rows) {
    const auto c = causal::back_out(r.att0, r.att1);
    detail += fmt("%s beta2 %.5f beta1 %.5f:", r.name, c.beta2, c.beta1);
    for (const auto& [b, want] : r.targets) {
      const double got = causal::att_at(c, b).value;
      pass = pass && std::abs(got - want) <= kAc3AbsTol;
      detail += fmt(" B=%g %.4f (table %.4f)", b, got, want);
    }
    detail += "; ";
  }
  return {pass, detail + fmt("tol %.3f", kAc3AbsTol)};
}

Outcome ac4() {
  const auto floor = causal::back_out(-0.0058, 0.0273);
  const auto ceiling = causal::back_out(-0.0577, -0.0238);
  const double g1 = causal::taylor_gap(floor), g2 = causal::taylor_gap(ceiling);
  return {std::abs(g1) <= kAc4GapTol && std::abs(g2) <= kAc4GapTol,
          fmt("gap floor %.5f, ceiling %.5f (tol %.3f)", g1, g2, kAc4GapTol)};
}

Outcome ac5() {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> states(6, 8), counties(2, 3), years(6, 8);
  double worst_coef = 0.0, worst_vcov = 0.0;
  std::size_t max_rows = 0;
  int failures = 0;
  for (int p = 0; p < kAc5Panels; ++p) {
    synth::PanelConfig c;
    c.n_states = states(rng);
    c.counties_per_state = counties(rng);
    c.first_year = 2010;
    c.last_year = 2010 + years(rng) - 1;
    c.cohort_years = {2012, 2013, 2014};
    c.never_treated_fraction = 0.4;
    c.untyped_fraction = 0.3;
    c.controls = {{"income", 10.0, 0.3}};
    c.seed = 5000 + static_cast<std::uint64_t>(p);
    synth::TrueParameters truth;
    truth.beta1 = {0.05};
    truth.beta2 = {0.1};
    truth.beta3 = {0.0};
    truth.beta5 = {0.2};
    const auto panel = synth::simulate_panel(c, truth);
    max_rows = std::max(max_rows, panel.size());

    const ppml::Design full = causal::build_design(panel);
    const auto f = ppml::fit(full);
    if (!f.converged) {
      ++failures;
      continue;
    }
    // The oracle sees the rows and columns the fit retained.
    ppml::Design d = full.subset(f.rows);
    Eigen::MatrixXd x(d.x.rows(), static_cast<Eigen::Index>(f.names.size()));
    for (std::size_t k = 0; k < f.names.size(); ++k) {
      const auto pos = std::find(d.names.begin(), d.names.end(), f.names[k]) - d.names.begin();
      x.col(static_cast<Eigen::Index>(k)) = d.x.col(pos);
    }
    d.x = x;
    d.names = f.names;
    const auto o = oracle::dense_ppml(d);
    const double ce = (f.coefficients - o.beta).cwiseAbs().maxCoeff();
    const double ve = (f.vcov_cluster - o.vcov).cwiseAbs().maxCoeff();
    worst_coef = std::max(worst_coef, ce);
    worst_vcov = std::max(worst_vcov, ve);
    failures += ce > kAc5CoefTol || ve > kAc5VcovTol;
  }
  return {failures == 0 && max_rows <= kAc5MaxRows,
          fmt("%d panels, <= %zu rows; max |coef diff| %.2e (tol %.0e), max |vcov diff| %.2e (tol %.0e)",
              kAc5Panels, max_rows, worst_coef, kAc5CoefTol, worst_vcov, kAc5VcovTol)};
}

synth::PanelConfig study_panel() {
  synth::PanelConfig c;  // 50 states x 20 counties x 2010-2019
  c.cohort_years = {2012, 2013, 2014, 2015, 2016, 2017};
  c.seed = 20240601;
  return c;
}

synth::TrueParameters study_truth() {
  synth::TrueParameters t;
  t.beta1 = {0.03};
  t.beta2 = {-0.006};
  t.beta3 = {0.0};
  return t;
}

Outcome ac6() {
  pipeline::StudyOptions o;
  o.replications = kAc6Reps;
  const auto s = pipeline::recovery_study(study_panel(), study_truth(), "price_floor", o).summary;
  const bool pass = s.bias1_in_se < kAc6MaxBiasInSe && s.bias2_in_se < kAc6MaxBiasInSe &&
                    s.coverage1 >= kAc6CoverageLow && s.coverage1 <= kAc6CoverageHigh &&
                    s.coverage2 >= kAc6CoverageLow && s.coverage2 <= kAc6CoverageHigh;
  return {pass, fmt("%zu reps; beta1 mean %.5f bias %.3f SE cover %.3f; beta2 mean %.5f bias %.3f SE cover %.3f",
                    s.replications, s.mean_beta1, s.bias1_in_se, s.coverage1, s.mean_beta2, s.bias2_in_se,
                    s.coverage2)};
}

Outcome ac7() {
  pipeline::StudyOptions o;
  o.replications = kAc7ResetReps;
  const double reset = pipeline::size_study(pipeline::Diagnostic::reset, study_panel(), study_truth(), o).summary.rate;
  o.replications = kAc7PlaceboReps;
  const double placebo = pipeline::size_study(pipeline::Diagnostic::placebo, study_panel(), study_truth(), o).summary.rate;
  o.replications = kAc7EventReps;
  const double event = pipeline::size_study(pipeline::Diagnostic::event_study, study_panel(), study_truth(), o).summary.rate;
  const bool pass = reset >= kAc7ResetLow && reset <= kAc7ResetHigh && placebo <= kAc7MaxRate && event <= kAc7MaxRate;
  return {pass, fmt("RESET %.4f of %zu (band [%.3f, %.3f]); placebo %.4f of %zu; event-study pre-test %.4f of %zu "
                    "(max %.2f)",
                    reset, kAc7ResetReps, kAc7ResetLow, kAc7ResetHigh, placebo, kAc7PlaceboReps, event,
                    kAc7EventReps, kAc7MaxRate)};
}

Outcome ac8() {
  pipeline::ConsistencySpec spec;
  spec.base.telehealth_supply = {2.0, 1.0};
  spec.base.inperson_supply = {1.0, 1.0};
  spec.base.production = {1.0, 0.5, 0.8};
  spec.panel = study_panel();
  spec.panel.county_effect_mean = 5.0;
  spec.panel.broadband.levels = {0.0, 1.0, 2.0};
  pipeline::StudyOptions o;
  o.replications = kAc8Reps;
  const auto s = pipeline::consistency_study(spec, o).summary;
  return {s.pass_rate >= kAc8MinPassRate,
          fmt("true log effects %.4f %.4f %.4f; ATT increasing and positive at B>=1 in %zu/%zu (min %.2f)",
              s.true_log_effects[0], s.true_log_effects[1], s.true_log_effects[2], s.passes, s.replications,
              kAc8MinPassRate)};
}

Outcome ac9() {
  std::mt19937_64 rng(909);
  std::uniform_int_distribution<int> mean(3, 60), reps(1, 5), spread(0, 2);
  double worst = 0.0;
  for (int fixture = 0; fixture < 20; ++fixture) {
    std::map<std::pair<int, int>, int> cell_mean;
    ppml::Design d;
    d.names = {"interaction"};
    d.absorb.assign(2, {});
    d.absorb_names = {"group", "period"};
    std::vector<double> ys, xs;
    for (int g = 0; g < 2; ++g) {
      for (int t = 0; t < 2; ++t) {
        const int m = fixture == 0 ? std::vector<int>{10, 12, 10, 15}[2 * g + t] : mean(rng);
        cell_mean[{g, t}] = m;
        const int k = reps(rng);
        const int s = std::min(spread(rng), m);
        // Values m - s, m + s in pairs (plus m when k is odd) average to m.
        for (int i = 0; i < k; ++i) {
          const double y = (k % 2 == 1 && i == k - 1) ? m : (i % 2 == 0 ? m - s : m + s);
          ys.push_back(y);
          xs.push_back(g * t);
          d.absorb[0].push_back(g);
          d.absorb[1].push_back(t);
        }
      }
    }
    d.y = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
    d.x = Eigen::Map<Eigen::MatrixXd>(xs.data(), static_cast<Eigen::Index>(xs.size()), 1);
    for (std::size_t i = 0; i < ys.size(); ++i) d.cluster.push_back(static_cast<int>(i));
    const auto f = ppml::fit(d);
    const double want = std::log(double(cell_mean[{1, 1}]) * cell_mean[{0, 0}] /
                                 (double(cell_mean[{1, 0}]) * cell_mean[{0, 1}]));
    worst = std::max(worst, f.converged ? std::abs(f.coef("interaction") - want) : INFINITY);
  }
  return {worst <= kAc9Tol, fmt("20 fixtures; max |beta - ln(y11 y00 / (y10 y01))| %.2e (tol %.0e)", worst, kAc9Tol)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path log_dir = argc > 1 ? argv[1] : ".";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC-1", ac1}, {"AC-2", [&] { return ac2(log_dir); }}, {"AC-3", ac3}, {"AC-4", ac4}, {"AC-5", ac5},
      {"AC-6", ac6}, {"AC-7", ac7}, {"AC-8", ac8}, {"AC-9", ac9}};
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s  %s [%.1fs]\n", name.c_str(), out.pass ? "PASS" : "FAIL", out.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !out.pass;
  }
  return failed == 0 ? 0 : 1;
}
