#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tpreg::synth {

/// Cohort value for states that never adopt.
inline constexpr int kNeverTreated = 0;

/// County-year panel stored column-wise. Row i of every column describes the
/// same (county, year) observation.
struct PanelDataset {
  std::vector<int> county_id;
  std::vector<int> state_id;
  std::vector<int> year;
  std::vector<double> outcome;
  std::vector<int> cohort;  // first treated year, kNeverTreated if never
  std::vector<int> post;    // 1 iff cohort != never and year >= cohort
  std::vector<double> broadband_z;
  std::vector<int> metro;

  std::vector<std::string> type_names;           // treatment types k
  std::vector<std::vector<double>> type_flags;   // [k][row], M_ik in {0, 1}
  std::vector<std::string> control_names;
  std::vector<std::vector<double>> controls;     // [c][row]

  std::size_t size() const { return county_id.size(); }
  bool empty() const { return county_id.empty(); }

  bool treated(std::size_t row) const { return cohort[row] != kNeverTreated; }
  /// year - cohort for treated rows, nullopt for never-treated rows.
  std::optional<int> rel_time(std::size_t row) const;
  /// Clusters are states.
  const std::vector<int>& cluster_id() const { return state_id; }

  /// Index of a type or control by name, or nullopt.
  std::optional<std::size_t> type_index(const std::string& name) const;
  std::optional<std::size_t> control_index(const std::string& name) const;

  /// Appends row `row` of `other` (same schema) to this dataset.
  void append_row(const PanelDataset& other, std::size_t row);
  /// Empty dataset with the same type and control names.
  PanelDataset empty_like() const;
  /// Rows `rows` in the given order.
  PanelDataset select(const std::vector<std::size_t>& rows) const;

  /// Sorts rows by (county_id, year).
  void sort_canonical();

  /// Throws DataError on inconsistent columns: length mismatch, duplicate
  /// (county, year) keys, post not matching cohort, cohort or type flags
  /// varying within a state, negative outcomes.
  void validate() const;
};

/// Drops states whose cohort precedes `first_allowed` (always treated in the
/// window) and rewrites cohorts after `last_allowed` as never treated. Throws
/// DataError if nothing remains.
PanelDataset apply_sample_window(const PanelDataset& data, int first_allowed, int last_allowed);

/// Pre-treatment placebo panel: every treated state gets the fake cohort
/// cohort - shift_years, and its rows from the true cohort onward are
/// dropped. Never-treated rows are kept unchanged, so a panel without treated
/// states comes back as is. Throws DataError when treated states exist but
/// none has a pre-period row, or when shift_years < 1.
PanelDataset make_placebo(const PanelDataset& data, int shift_years);

}  // namespace tpreg::synth
