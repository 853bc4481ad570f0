#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tpreg/ppml/fit.hpp"
#include "tpreg/synth/panel.hpp"

namespace tpreg::causal {

// Regressor names produced by the design builders.
std::string triple_column(const std::string& type);      // M_k * Post * B
std::string treat_post_column(const std::string& type);  // M_k * Post
std::string treat_bb_column(const std::string& type);    // M_k * B
inline const std::string kPostBroadband = "post:bb";     // Post * B
inline const std::string kBroadband = "broadband";       // B as a control

struct DesignOptions {
  std::vector<std::string> types;  // empty: every type in the dataset
  bool include_triple = true;      // false gives the two-way (M_k * Post) model
  bool broadband_control = true;   // standardized broadband among the controls
  bool include_controls = true;
};

/// Named columns accumulated before they become a ppml::Design.
struct ColumnSet {
  std::vector<std::pair<std::string, std::vector<double>>> columns;
  void add(std::string name, std::vector<double> values);
};

/// Outcome, county and year absorption and state clusters of a panel, with
/// the given regressor columns.
ppml::Design make_design(const synth::PanelDataset& data, const ColumnSet& columns);

/// Appends the broadband and control columns requested by `options`.
void add_controls(const synth::PanelDataset& data, const DesignOptions& options, ColumnSet& out);

/// Interaction design in the order M_k Post B (all k), M_k Post, M_k B,
/// Post B, then controls. Collinear columns are removed later by the fit in
/// that order, so the triple interactions are the last to go. Throws
/// DataError for an unknown type.
ppml::Design build_design(const synth::PanelDataset& data, const DesignOptions& options = {});

/// The types a design covers: options.types, or all of the dataset's.
std::vector<std::string> resolve_types(const synth::PanelDataset& data,
                                       const std::vector<std::string>& requested);

}  // namespace tpreg::causal
