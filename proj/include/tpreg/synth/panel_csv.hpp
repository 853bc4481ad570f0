#pragma once

#include <iosfwd>
#include <string>

#include "tpreg/synth/panel.hpp"

namespace tpreg::synth {

// Canonical panel CSV. Header:
//   county_id,state_id,year,outcome,cohort,post,rel_time,broadband_z,metro,
//   cluster_id,type_<name>...,control_<name>...
// cohort and rel_time read "never" / "NA" for never-treated rows. Reals are
// written with 17 significant digits, so a write/read cycle is lossless.

void write_panel_csv(std::ostream& out, const PanelDataset& data);
PanelDataset read_panel_csv(std::istream& in);

PanelDataset read_panel_csv_file(const std::string& path);

/// Formats a double with 17 significant digits ("%.17g").
std::string format_real(double value);

}  // namespace tpreg::synth
