#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tpreg/synth/panel.hpp"

namespace tpreg::synth {

/// Coefficients of the multiplicative index
///   ln mu = lambda_county + gamma_year
///         + sum_k M_k (beta1_k Post B + beta2_k Post + beta3_k B)
///         + beta4 Post B + beta_broadband B + beta5' X.
/// In this parameterization the signs of beta1/beta3 carry whether
/// broadband makes a regime more or less conducive to use.
struct TrueParameters {
  std::vector<double> beta1;  // per type
  std::vector<double> beta2;  // per type
  std::vector<double> beta3;  // per type
  double beta4 = 0.0;
  double beta_broadband = 0.0;
  std::vector<double> beta5;  // per control
  std::map<int, double> county_effects;
  std::map<int, double> year_effects;

  /// Throws ConfigError unless the vectors match the type and control counts.
  void validate(std::size_t n_types, std::size_t n_controls) const;
};

struct BroadbandProcess {
  double trend = 0.1;             // common increase per year
  double county_sd = 1.0;         // dispersion of county intercepts
  double county_trend_sd = 0.05;  // dispersion of county slopes
  double noise_sd = 0.2;
  /// Non-empty: each county gets one of these values (uniformly, constant
  /// over time) and no standardization is applied.
  std::vector<double> levels;
};

struct ControlProcess {
  std::string name;
  double log_mean = 0.0;  // the control is ln(level), level ~ LogNormal(log_mean, log_sd)
  double log_sd = 1.0;
};

struct PanelConfig {
  int n_states = 50;
  int counties_per_state = 20;
  int first_year = 2010;
  int last_year = 2019;
  std::vector<int> cohort_years{2012, 2013, 2014, 2015, 2016, 2017};
  double never_treated_fraction = 0.5;
  std::vector<std::string> type_names{"price_floor"};
  /// Optional explicit state -> type index. States not listed are assigned
  /// cyclically.
  std::map<int, int> type_assignment;
  /// Share of adopting states that carry no type flag (identifies Post x B).
  double untyped_fraction = 0.0;

  BroadbandProcess broadband;
  std::vector<ControlProcess> controls;

  double county_effect_mean = 3.0;
  double county_effect_sd = 0.5;
  double year_effect_sd = 0.1;
  double metro_fraction = 0.4;

  /// Gamma mixing shape for over-dispersed counts; 0 gives Poisson.
  double overdispersion_shape = 0.0;
  /// Added to the index of ever-treated rows: treated_trend * (year - cohort).
  double treated_trend = 0.0;
  /// Added to the index: quadratic * (index - county_effect_mean)^2, a
  /// nonlinearity the log-linear model omits.
  double quadratic = 0.0;

  std::uint64_t seed = 20240601;
  std::uint64_t replicate = 0;

  int n_years() const { return last_year - first_year + 1; }
  void validate() const;
};

/// Per-state cohort (kNeverTreated if never) and type index (-1 for none).
struct TreatmentAssignment {
  std::vector<int> state_ids;
  std::vector<int> cohort;
  std::vector<int> type;
};

/// Deterministic engine for (seed, replicate, stream).
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream);

/// Shuffles states, marks round(fraction * n_states) of them never treated
/// and gives the rest cohorts and types cyclically. Throws ConfigError if
/// adopters exist but cohort_years is empty.
TreatmentAssignment assign_cohorts(const PanelConfig& config);

/// Fills missing county and year effects with draws from the configured
/// distributions. Existing entries are kept.
TrueParameters with_fixed_effects(const TrueParameters& params, const PanelConfig& config);

/// Extra index contribution for a row of the covariate skeleton.
using IndexHook = std::function<double(const PanelDataset& skeleton, std::size_t row)>;

/// Panel rows with every column except outcome (set to 0): ids, cohorts,
/// type flags, broadband and controls. Sorted by (county_id, year).
PanelDataset build_skeleton(const TreatmentAssignment& assignment, const PanelConfig& config);

/// The linear index of each row under `params` (fixed effects required for
/// every county and year present) plus the configured trend/quadratic terms
/// and the optional hook.
std::vector<double> linear_index(const PanelDataset& skeleton, const TrueParameters& params,
                                 const PanelConfig& config, const IndexHook& hook = {});

/// Draws outcomes ~ Poisson(exp(index)) (gamma-mixed when over-dispersed).
/// Throws DataError when exp(index) exceeds 1e12 or the index is not finite.
PanelDataset simulate_outcomes(const TreatmentAssignment& assignment,
                               const TrueParameters& params, const PanelConfig& config,
                               const IndexHook& hook = {});

/// assign_cohorts + with_fixed_effects + simulate_outcomes.
PanelDataset simulate_panel(const PanelConfig& config, const TrueParameters& params,
                            const IndexHook& hook = {});

}  // namespace tpreg::synth
