#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tpreg/causal/design.hpp"
#include "tpreg/causal/effects.hpp"
#include "tpreg/ppml/fit.hpp"
#include "tpreg/ppml/stats.hpp"
#include "tpreg/synth/panel.hpp"

namespace tpreg::causal {

struct EventStudyOptions {
  int window_pre = 7;    // relative years <= -window_pre share one bin
  int window_post = 7;   // relative years >= window_post share one bin
  /// Empty: every adopting state is treated. Otherwise the sample is the
  /// never-treated states plus the states of this type.
  std::string type;
  bool broadband_interactions = true;  // D_r x B columns
  DesignOptions controls;              // only the control switches are used
  /// Also run a one-restriction score test per pre-period bin (one extra
  /// restricted fit each); fills EventCoefficient::score_p.
  bool individual_score_tests = false;
  ppml::FitOptions fit;
};

struct EventCoefficient {
  int rel_time = 0;
  bool base = false;  // the omitted period -1, reported as exactly 0
  Estimate level;
  std::optional<Estimate> broadband_slope;
  std::optional<double> score_p;  // F(1, G - 1) p-value of the bin's score test
};

struct EventStudyResult {
  std::vector<EventCoefficient> coefficients;  // ascending rel_time
  /// Joint test that the level terms with r < -1 are zero: cluster-robust
  /// score test from the fit without them.
  ppml::WaldTest pre_test;
  /// The same hypothesis as a cluster-robust Wald test on the full fit. The
  /// endpoint bins are identified by a single adoption cohort, so this form
  /// over-rejects when each cohort spans only a handful of clusters.
  ppml::WaldTest pre_wald;
  ppml::FitResult fit;
};

/// Column name for the relative-time indicator of bin r.
std::string event_column(int rel_time);
std::string event_bb_column(int rel_time);

/// Relative-time PPML regression with period -1 omitted. Throws DataError
/// when a relative-time bin has no observations or the window is empty, and
/// ConvergenceError if the fit does not converge.
EventStudyResult event_study(const synth::PanelDataset& data, const EventStudyOptions& options = {});

}  // namespace tpreg::causal
