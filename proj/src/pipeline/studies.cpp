#include "tpreg/pipeline/studies.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <ostream>

#include "tpreg/causal/design.hpp"
#include "tpreg/causal/effects.hpp"
#include "tpreg/causal/event_study.hpp"
#include "tpreg/causal/placebo.hpp"
#include "tpreg/equilibrium/solver.hpp"
#include "tpreg/errors.hpp"
#include "tpreg/ppml/reset.hpp"
#include "tpreg/synth/panel_csv.hpp"

namespace tpreg::pipeline {

namespace {

synth::PanelDataset replicate_panel(synth::PanelConfig config, const synth::TrueParameters& truth,
                                    std::size_t r, const synth::IndexHook& hook = {}) {
  config.replicate = r;
  return synth::simulate_panel(config, truth, hook);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

RecoveryStudy recovery_study(const synth::PanelConfig& config, const synth::TrueParameters& truth,
                             const std::string& type, const StudyOptions& options) {
  const auto k = std::find(config.type_names.begin(), config.type_names.end(), type);
  if (k == config.type_names.end()) throw ConfigError("recovery study: unknown type \"" + type + "\"");
  const std::size_t ki = static_cast<std::size_t>(k - config.type_names.begin());
  if (ki >= truth.beta1.size() || ki >= truth.beta2.size()) {
    throw ConfigError("recovery study: true parameters do not cover type \"" + type + "\"");
  }

  RecoveryStudy study;
  study.rows = run_replications<RecoveryRow>(options.replications, options.threads, [&](std::size_t r) {
    const auto panel = replicate_panel(config, truth, r);
    const auto fit = ppml::fit(causal::build_design(panel));
    if (!fit.converged) throw ConvergenceError("recovery study: replicate " + std::to_string(r) + " did not converge");
    const auto c = causal::type_coefficients(fit, type);
    return RecoveryRow{r, c.beta1, std::sqrt(c.var1), c.beta2, std::sqrt(c.var2)};
  });

  RecoverySummary& s = study.summary;
  s.replications = study.rows.size();
  s.true_beta1 = truth.beta1[ki];
  s.true_beta2 = truth.beta2[ki];
  std::vector<double> b1, b2, se1, se2;
  std::size_t cover1 = 0, cover2 = 0;
  for (const auto& row : study.rows) {
    b1.push_back(row.beta1);
    b2.push_back(row.beta2);
    se1.push_back(row.se1);
    se2.push_back(row.se2);
    cover1 += std::abs(row.beta1 - s.true_beta1) <= causal::kZ95 * row.se1;
    cover2 += std::abs(row.beta2 - s.true_beta2) <= causal::kZ95 * row.se2;
  }
  s.mean_beta1 = mean(b1);
  s.mean_beta2 = mean(b2);
  s.sd_beta1 = sample_sd(b1);
  s.sd_beta2 = sample_sd(b2);
  s.mean_se1 = mean(se1);
  s.mean_se2 = mean(se2);
  s.bias1_in_se = std::abs(s.mean_beta1 - s.true_beta1) / s.mean_se1;
  s.bias2_in_se = std::abs(s.mean_beta2 - s.true_beta2) / s.mean_se2;
  const double n = static_cast<double>(std::max<std::size_t>(s.replications, 1));
  s.coverage1 = static_cast<double>(cover1) / n;
  s.coverage2 = static_cast<double>(cover2) / n;
  return study;
}

Diagnostic parse_diagnostic(const std::string& name) {
  if (name == "reset") return Diagnostic::reset;
  if (name == "placebo") return Diagnostic::placebo;
  if (name == "event_study") return Diagnostic::event_study;
  throw ConfigError("unknown diagnostic \"" + name + "\" (expected reset, placebo or event_study)");
}

std::string diagnostic_name(Diagnostic d) {
  switch (d) {
    case Diagnostic::reset: return "reset";
    case Diagnostic::placebo: return "placebo";
    case Diagnostic::event_study: return "event_study";
  }
  return "reset";
}

RejectionStudy size_study(Diagnostic test, const synth::PanelConfig& config,
                          const synth::TrueParameters& truth, const StudyOptions& options) {
  const double alpha = options.alpha;
  RejectionStudy study;
  study.rows = run_replications<RejectionRow>(options.replications, options.threads, [&](std::size_t r) {
    const auto panel = replicate_panel(config, truth, r);
    RejectionRow row;
    row.replicate = r;
    switch (test) {
      case Diagnostic::reset: {
        const auto res = ppml::reset_test(causal::build_design(panel));
        row.statistic = res.test.statistic;
        row.p_value = res.test.p_value;
        row.reject = row.p_value < alpha;
        break;
      }
      case Diagnostic::placebo: {
        const auto res = causal::placebo_test(panel);
        row.statistic = res.interaction.z;
        row.p_value = res.interaction.p;
        row.reject = res.interaction.p < alpha;
        break;
      }
      case Diagnostic::event_study: {
        const auto res = causal::event_study(panel);
        row.statistic = res.pre_test.statistic;
        row.p_value = res.pre_test.p_value_f;
        row.reject = res.pre_test.rejects(alpha);
        break;
      }
    }
    return row;
  });
  RejectionSummary& s = study.summary;
  s.test = diagnostic_name(test);
  s.replications = study.rows.size();
  s.alpha = alpha;
  for (const auto& row : study.rows) s.rejections += row.reject;
  s.rate = s.replications ? static_cast<double>(s.rejections) / static_cast<double>(s.replications) : 0.0;
  return study;
}

double equilibrium_log_effect(const ConsistencySpec& spec, double b) {
  const auto unreg0 = equilibrium::solve_unregulated(spec.base, spec.solver);
  const double rho = spec.floor_markup * unreg0.telehealth_unit_revenue();
  const auto primitives = spec.link.at(spec.base, b);
  if (!(primitives.telehealth_supply.elasticity > primitives.inperson_supply.elasticity)) {
    throw ConfigError("consistency study: telehealth supply must be more elastic than in-person supply");
  }
  const auto unreg = equilibrium::solve_unregulated(primitives, spec.solver);
  const double shift = equilibrium::equilibrium_shift(
      primitives, equilibrium::PolicyRegime::price_floor(rho), spec.solver);
  return std::log1p(shift / unreg.quantity);
}

synth::IndexHook equilibrium_hook(const ConsistencySpec& spec) {
  auto cache = std::make_shared<std::map<double, double>>();
  auto mutex = std::make_shared<std::mutex>();
  return [spec, cache, mutex](const synth::PanelDataset& s, std::size_t row) {
    if (!s.post[row]) return 0.0;
    const auto k = s.type_index(spec.type);
    if (!k || s.type_flags[*k][row] != 1.0) return 0.0;
    const double b = s.broadband_z[row];
    std::lock_guard lock(*mutex);
    auto it = cache->find(b);
    if (it == cache->end()) it = cache->emplace(b, equilibrium_log_effect(spec, b)).first;
    return it->second;
  };
}

ConsistencyStudy consistency_study(const ConsistencySpec& spec, const StudyOptions& options) {
  const auto& levels = spec.panel.broadband.levels;
  if (levels.empty()) throw ConfigError("consistency study: panel.broadband.levels is empty");
  if (std::find(spec.panel.type_names.begin(), spec.panel.type_names.end(), spec.type) ==
      spec.panel.type_names.end()) {
    throw ConfigError("consistency study: the panel has no type \"" + spec.type + "\"");
  }
  ConsistencyStudy study;
  ConsistencySummary& s = study.summary;
  s.levels = levels;
  for (double b : levels) s.true_log_effects.push_back(equilibrium_log_effect(spec, b));

  synth::TrueParameters zero;
  const std::size_t nk = spec.panel.type_names.size();
  zero.beta1.assign(nk, 0.0);
  zero.beta2.assign(nk, 0.0);
  zero.beta3.assign(nk, 0.0);
  const synth::IndexHook hook = equilibrium_hook(spec);

  study.rows = run_replications<ConsistencyRow>(options.replications, options.threads, [&](std::size_t r) {
    const auto panel = replicate_panel(spec.panel, zero, r, hook);
    const auto fit = ppml::fit(causal::build_design(panel));
    if (!fit.converged) throw ConvergenceError("consistency study: replicate " + std::to_string(r) + " did not converge");
    const auto c = causal::type_coefficients(fit, spec.type);
    ConsistencyRow row;
    row.replicate = r;
    row.beta1 = c.beta1;
    row.beta2 = c.beta2;
    row.increasing = true;
    row.positive_from_one = true;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      row.att.push_back(causal::att_at(c, levels[i]).value);
      if (i > 0 && !(row.att[i] > row.att[i - 1])) row.increasing = false;
      if (levels[i] >= 1.0 && !(row.att[i] > 0.0)) row.positive_from_one = false;
    }
    row.pass = row.increasing && row.positive_from_one;
    return row;
  });
  s.replications = study.rows.size();
  for (const auto& row : study.rows) s.passes += row.pass;
  s.pass_rate = s.replications ? static_cast<double>(s.passes) / static_cast<double>(s.replications) : 0.0;
  return study;
}

void write_recovery_csv(std::ostream& out, const std::vector<RecoveryRow>& rows) {
  using synth::format_real;
  out << "replicate,beta1,se1,beta2,se2\n";
  for (const auto& r : rows) {
    out << r.replicate << ',' << format_real(r.beta1) << ',' << format_real(r.se1) << ','
        << format_real(r.beta2) << ',' << format_real(r.se2) << '\n';
  }
}

void write_rejection_csv(std::ostream& out, const std::vector<RejectionRow>& rows) {
  using synth::format_real;
  out << "replicate,statistic,p_value,reject\n";
  for (const auto& r : rows) {
    out << r.replicate << ',' << format_real(r.statistic) << ',' << format_real(r.p_value) << ','
        << (r.reject ? 1 : 0) << '\n';
  }
}

void write_consistency_csv(std::ostream& out, const ConsistencySummary& summary,
                           const std::vector<ConsistencyRow>& rows) {
  using synth::format_real;
  out << "replicate,beta1,beta2";
  for (double b : summary.levels) out << ",att_b" << format_real(b);
  out << ",increasing,positive_from_one,pass\n";
  for (const auto& r : rows) {
    out << r.replicate << ',' << format_real(r.beta1) << ',' << format_real(r.beta2);
    for (double a : r.att) out << ',' << format_real(a);
    out << ',' << r.increasing << ',' << r.positive_from_one << ',' << r.pass << '\n';
  }
}

}  // namespace tpreg::pipeline
