#include "tpreg/synth/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tpreg/errors.hpp"

namespace tpreg::synth {

namespace {

enum Stream : std::uint64_t { kAssignment = 1, kCovariates = 2, kFixedEffects = 3, kOutcomes = 4 };

constexpr double kMaxMean = 1e12;

int county_id_for(int state, int local, const PanelConfig& c) {
  return (state - 1) * c.counties_per_state + local + 1;
}

}  // namespace

void TrueParameters::validate(std::size_t n_types, std::size_t n_controls) const {
  if (beta1.size() != n_types || beta2.size() != n_types || beta3.size() != n_types) {
    throw ConfigError("true parameters: beta1/beta2/beta3 need one entry per treatment type (" +
                      std::to_string(n_types) + ")");
  }
  if (beta5.size() != n_controls) {
    throw ConfigError("true parameters: beta5 needs one entry per control (" +
                      std::to_string(n_controls) + ")");
  }
}

void PanelConfig::validate() const {
  if (n_states < 1 || counties_per_state < 1) throw ConfigError("panel: need at least one county");
  if (first_year > last_year) throw ConfigError("panel: first_year > last_year");
  for (int c : cohort_years) {
    if (c < first_year || c > last_year) {
      throw ConfigError("panel: cohort year " + std::to_string(c) + " outside the year range");
    }
  }
  if (!(never_treated_fraction >= 0.0 && never_treated_fraction <= 1.0)) {
    throw ConfigError("panel: never_treated_fraction must lie in [0, 1]");
  }
  if (!(untyped_fraction >= 0.0 && untyped_fraction <= 1.0)) {
    throw ConfigError("panel: untyped_fraction must lie in [0, 1]");
  }
  for (const auto& [state, type] : type_assignment) {
    if (state < 1 || state > n_states) {
      throw ConfigError("panel: type_assignment names unknown state " + std::to_string(state));
    }
    if (type < 0 || type >= static_cast<int>(type_names.size())) {
      throw ConfigError("panel: type_assignment uses unknown type index " + std::to_string(type));
    }
  }
  if (broadband.county_sd < 0.0 || broadband.county_trend_sd < 0.0 || broadband.noise_sd < 0.0) {
    throw ConfigError("panel: broadband standard deviations must be >= 0");
  }
  for (const auto& c : controls) {
    if (c.name.empty()) throw ConfigError("panel: control without a name");
    if (c.log_sd < 0.0) throw ConfigError("panel: control " + c.name + " has log_sd < 0");
  }
  if (county_effect_sd < 0.0 || year_effect_sd < 0.0) {
    throw ConfigError("panel: fixed-effect standard deviations must be >= 0");
  }
  if (!(metro_fraction >= 0.0 && metro_fraction <= 1.0)) {
    throw ConfigError("panel: metro_fraction must lie in [0, 1]");
  }
  if (overdispersion_shape < 0.0) throw ConfigError("panel: overdispersion_shape must be >= 0");
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(replicate >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

TreatmentAssignment assign_cohorts(const PanelConfig& config) {
  config.validate();
  auto rng = make_engine(config.seed, config.replicate, kAssignment);
  const int n = config.n_states;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);

  const int n_never = static_cast<int>(std::lround(config.never_treated_fraction * n));
  const int n_adopt = n - n_never;
  if (n_adopt > 0 && config.cohort_years.empty()) {
    throw ConfigError("panel: cohort_years is empty but some states adopt");
  }
  const int n_untyped = static_cast<int>(std::lround(config.untyped_fraction * n_adopt));
  const int n_types = static_cast<int>(config.type_names.size());

  TreatmentAssignment out;
  out.state_ids.resize(n);
  std::iota(out.state_ids.begin(), out.state_ids.end(), 1);
  out.cohort.assign(n, kNeverTreated);
  out.type.assign(n, -1);
  const int n_cohorts = static_cast<int>(config.cohort_years.size());
  for (int j = 0; j < n_adopt; ++j) {
    const int state = order[n_never + j];
    out.cohort[state - 1] = config.cohort_years[j % n_cohorts];
    if (const auto it = config.type_assignment.find(state); it != config.type_assignment.end()) {
      out.type[state - 1] = it->second;
    } else if (n_types > 0 && j < n_adopt - n_untyped) {
      out.type[state - 1] = j % n_types;
    }
  }
  return out;
}

TrueParameters with_fixed_effects(const TrueParameters& params, const PanelConfig& config) {
  config.validate();
  auto rng = make_engine(config.seed, config.replicate, kFixedEffects);
  std::normal_distribution<double> county(config.county_effect_mean, config.county_effect_sd);
  std::normal_distribution<double> year(0.0, config.year_effect_sd);
  TrueParameters out = params;
  for (int s = 1; s <= config.n_states; ++s) {
    for (int c = 0; c < config.counties_per_state; ++c) {
      const double draw = county(rng);
      out.county_effects.emplace(county_id_for(s, c, config), draw);
    }
  }
  for (int t = config.first_year; t <= config.last_year; ++t) {
    const double draw = year(rng);
    out.year_effects.emplace(t, draw);
  }
  return out;
}

PanelDataset build_skeleton(const TreatmentAssignment& assignment, const PanelConfig& config) {
  config.validate();
  auto rng = make_engine(config.seed, config.replicate, kCovariates);
  std::normal_distribution<double> std_normal(0.0, 1.0);
  std::bernoulli_distribution metro(config.metro_fraction);
  const auto& bb = config.broadband;
  const bool level_mode = !bb.levels.empty();
  std::uniform_int_distribution<std::size_t> level_pick(0, level_mode ? bb.levels.size() - 1 : 0);

  PanelDataset d;
  d.type_names = config.type_names;
  d.type_flags.assign(d.type_names.size(), {});
  for (const auto& c : config.controls) d.control_names.push_back(c.name);
  d.controls.assign(d.control_names.size(), {});

  const std::size_t n_rows = static_cast<std::size_t>(config.n_states) *
                             config.counties_per_state * config.n_years();
  for (auto* v : {&d.county_id, &d.state_id, &d.year, &d.cohort, &d.post, &d.metro}) {
    v->reserve(n_rows);
  }

  for (int s = 1; s <= config.n_states; ++s) {
    const int cohort = assignment.cohort.at(s - 1);
    const int type = assignment.type.at(s - 1);
    for (int c = 0; c < config.counties_per_state; ++c) {
      const int county = county_id_for(s, c, config);
      const int is_metro = metro(rng) ? 1 : 0;
      const double intercept = bb.county_sd * std_normal(rng);
      const double slope = bb.trend + bb.county_trend_sd * std_normal(rng);
      const double level = level_mode ? bb.levels[level_pick(rng)] : 0.0;
      for (int t = config.first_year; t <= config.last_year; ++t) {
        d.county_id.push_back(county);
        d.state_id.push_back(s);
        d.year.push_back(t);
        d.outcome.push_back(0.0);
        d.cohort.push_back(cohort);
        d.post.push_back(cohort != kNeverTreated && t >= cohort ? 1 : 0);
        d.metro.push_back(is_metro);
        const double noise = bb.noise_sd * std_normal(rng);
        d.broadband_z.push_back(level_mode ? level
                                           : intercept + slope * (t - config.first_year) + noise);
        for (std::size_t k = 0; k < d.type_flags.size(); ++k) {
          d.type_flags[k].push_back(static_cast<int>(k) == type ? 1.0 : 0.0);
        }
        for (std::size_t x = 0; x < config.controls.size(); ++x) {
          std::lognormal_distribution<double> level_dist(config.controls[x].log_mean,
                                                         config.controls[x].log_sd);
          d.controls[x].push_back(std::log(level_dist(rng)));
        }
      }
    }
  }

  if (!level_mode && d.size() > 1) {
    const double n = static_cast<double>(d.size());
    const double mean = std::accumulate(d.broadband_z.begin(), d.broadband_z.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : d.broadband_z) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (sd > 0.0) {
      for (double& v : d.broadband_z) v = (v - mean) / sd;
    }
  }
  return d;
}

std::vector<double> linear_index(const PanelDataset& d, const TrueParameters& p,
                                 const PanelConfig& config, const IndexHook& hook) {
  p.validate(d.type_names.size(), d.control_names.size());
  std::vector<double> idx(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto ce = p.county_effects.find(d.county_id[i]);
    const auto ye = p.year_effects.find(d.year[i]);
    if (ce == p.county_effects.end() || ye == p.year_effects.end()) {
      throw ConfigError("true parameters lack a fixed effect for county " +
                        std::to_string(d.county_id[i]) + " or year " + std::to_string(d.year[i]));
    }
    const double b = d.broadband_z[i];
    const double post = d.post[i];
    double v = ce->second + ye->second + p.beta4 * post * b + p.beta_broadband * b;
    for (std::size_t k = 0; k < d.type_flags.size(); ++k) {
      const double m = d.type_flags[k][i];
      v += m * (p.beta1[k] * post * b + p.beta2[k] * post + p.beta3[k] * b);
    }
    for (std::size_t x = 0; x < d.controls.size(); ++x) v += p.beta5[x] * d.controls[x][i];
    if (config.treated_trend != 0.0 && d.treated(i)) {
      v += config.treated_trend * (d.year[i] - d.cohort[i]);
    }
    if (hook) v += hook(d, i);
    if (config.quadratic != 0.0) {
      const double centred = v - config.county_effect_mean;
      v += config.quadratic * centred * centred;
    }
    idx[i] = v;
  }
  return idx;
}

PanelDataset simulate_outcomes(const TreatmentAssignment& assignment, const TrueParameters& params,
                               const PanelConfig& config, const IndexHook& hook) {
  PanelDataset d = build_skeleton(assignment, config);
  const std::vector<double> idx = linear_index(d, params, config, hook);
  auto rng = make_engine(config.seed, config.replicate, kOutcomes);
  const double shape = config.overdispersion_shape;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!std::isfinite(idx[i])) {
      throw DataError("linear index is not finite at row " + std::to_string(i));
    }
    double mu = std::exp(idx[i]);
    if (!(mu <= kMaxMean)) {
      throw DataError("exp(index) exceeds 1e12 at row " + std::to_string(i));
    }
    if (shape > 0.0) mu *= std::gamma_distribution<double>(shape, 1.0 / shape)(rng);
    d.outcome[i] = mu > 0.0 ? static_cast<double>(std::poisson_distribution<long long>(mu)(rng))
                            : 0.0;
  }
  return d;
}

PanelDataset simulate_panel(const PanelConfig& config, const TrueParameters& params,
                            const IndexHook& hook) {
  const TreatmentAssignment assignment = assign_cohorts(config);
  return simulate_outcomes(assignment, with_fixed_effects(params, config), config, hook);
}

}  // namespace tpreg::synth
