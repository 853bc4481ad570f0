#pragma once

#include <string>

#include "tpreg/causal/design.hpp"
#include "tpreg/causal/effects.hpp"
#include "tpreg/ppml/fit.hpp"
#include "tpreg/synth/panel.hpp"

namespace tpreg::causal {

inline const std::string kPlaceboTreated = "placebo_treated";
inline const std::string kPlaceboTrend = "placebo_treated:rel_years";

struct PlaceboOptions {
  int shift_years = 2;
  DesignOptions controls;  // only the control switches are used
  ppml::FitOptions fit;
};

struct PlaceboResult {
  Estimate treated;      // fictitious post indicator
  Estimate interaction;  // treated x (year - fictitious cohort)
  std::size_t rows = 0;
  ppml::FitResult fit;
};

/// Fits the fictitious-treatment indicator and its interaction with relative
/// years on the pre-treatment panel from synth::make_placebo. Throws
/// DataError when the panel has no treated states or no treated pre-period.
PlaceboResult placebo_test(const synth::PanelDataset& data, const PlaceboOptions& options = {});

}  // namespace tpreg::causal
