#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tpreg/causal/effects.hpp"
#include "tpreg/causal/event_study.hpp"
#include "tpreg/ppml/fit.hpp"

namespace tpreg::causal {

inline const std::vector<double> kDefaultLevels{0, 1, 2, 4, 8, 12};

struct LevelEstimate {
  double broadband = 0.0;
  Estimate att;
};

struct CausalSummary {
  std::string policy_type;
  std::vector<LevelEstimate> levels;
  double acrt_at = 0.0;
  AcrtEstimates acrt;
  double taylor_gap = 0.0;
  double att_percent = 0.0;
};

/// ATT at each level plus ACRT (both forms) at `acrt_at`.
CausalSummary att_table(const ppml::FitResult& fit, const std::string& type,
                        const std::vector<double>& levels = kDefaultLevels, double acrt_at = 0.0);
CausalSummary att_table(const TypeCoefficients& c, const std::string& type,
                        const std::vector<double>& levels = kDefaultLevels, double acrt_at = 0.0);

/// Table-IV layout: policy_type,metric,coefficient,std_error,z,p,ci_low,ci_high
/// with one "ATT(B=b)" row per level and one "ACRT(B=b)" row (derivative form).
void write_att_table_csv(std::ostream& out, const std::vector<CausalSummary>& summaries);

/// Table-XII layout with the same columns; metric "rel(r)" and "rel(r):bb".
void write_event_study_csv(std::ostream& out, const std::string& policy_type,
                           const EventStudyResult& result);

/// Shortest decimal for a level label: 0, 1, 2.5, ...
std::string format_level(double b);

}  // namespace tpreg::causal
