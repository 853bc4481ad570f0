#include "tpreg/synth/panel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "tpreg/errors.hpp"

namespace tpreg::synth {

std::optional<int> PanelDataset::rel_time(std::size_t row) const {
  if (!treated(row)) return std::nullopt;
  return year[row] - cohort[row];
}

std::optional<std::size_t> PanelDataset::type_index(const std::string& name) const {
  const auto it = std::find(type_names.begin(), type_names.end(), name);
  if (it == type_names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - type_names.begin());
}

std::optional<std::size_t> PanelDataset::control_index(const std::string& name) const {
  const auto it = std::find(control_names.begin(), control_names.end(), name);
  if (it == control_names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - control_names.begin());
}

void PanelDataset::append_row(const PanelDataset& o, std::size_t r) {
  county_id.push_back(o.county_id[r]);
  state_id.push_back(o.state_id[r]);
  year.push_back(o.year[r]);
  outcome.push_back(o.outcome[r]);
  cohort.push_back(o.cohort[r]);
  post.push_back(o.post[r]);
  broadband_z.push_back(o.broadband_z[r]);
  metro.push_back(o.metro[r]);
  for (std::size_t k = 0; k < type_flags.size(); ++k) type_flags[k].push_back(o.type_flags[k][r]);
  for (std::size_t c = 0; c < controls.size(); ++c) controls[c].push_back(o.controls[c][r]);
}

PanelDataset PanelDataset::empty_like() const {
  PanelDataset out;
  out.type_names = type_names;
  out.control_names = control_names;
  out.type_flags.assign(type_names.size(), {});
  out.controls.assign(control_names.size(), {});
  return out;
}

PanelDataset PanelDataset::select(const std::vector<std::size_t>& rows) const {
  PanelDataset out = empty_like();
  for (std::size_t r : rows) out.append_row(*this, r);
  return out;
}

void PanelDataset::sort_canonical() {
  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::pair(county_id[a], year[a]) < std::pair(county_id[b], year[b]);
  });
  *this = select(order);
}

void PanelDataset::validate() const {
  const std::size_t n = size();
  auto check_len = [&](std::size_t len, const std::string& name) {
    if (len != n) throw DataError("panel column " + name + " has the wrong length");
  };
  check_len(state_id.size(), "state_id");
  check_len(year.size(), "year");
  check_len(outcome.size(), "outcome");
  check_len(cohort.size(), "cohort");
  check_len(post.size(), "post");
  check_len(broadband_z.size(), "broadband_z");
  check_len(metro.size(), "metro");
  if (type_flags.size() != type_names.size() || controls.size() != control_names.size()) {
    throw DataError("panel column names and columns disagree");
  }
  for (std::size_t k = 0; k < type_flags.size(); ++k) check_len(type_flags[k].size(), type_names[k]);
  for (std::size_t c = 0; c < controls.size(); ++c) check_len(controls[c].size(), control_names[c]);

  std::set<std::pair<int, int>> keys;
  std::map<int, std::size_t> state_first_row;
  std::map<int, int> county_state;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keys.emplace(county_id[i], year[i]).second) {
      throw DataError("duplicate (county, year) key (" + std::to_string(county_id[i]) + ", " +
                      std::to_string(year[i]) + ")");
    }
    if (!(outcome[i] >= 0.0) || !std::isfinite(outcome[i])) {
      throw DataError("negative or non-finite outcome at row " + std::to_string(i));
    }
    if (!std::isfinite(broadband_z[i])) {
      throw DataError("non-finite broadband at row " + std::to_string(i));
    }
    const int expected_post = (cohort[i] != kNeverTreated && year[i] >= cohort[i]) ? 1 : 0;
    if (post[i] != expected_post) {
      throw DataError("post indicator inconsistent with cohort at row " + std::to_string(i));
    }
    const auto [cs, fresh_county] = county_state.emplace(county_id[i], state_id[i]);
    if (!fresh_county && cs->second != state_id[i]) {
      throw DataError("county " + std::to_string(county_id[i]) + " appears in two states");
    }
    const auto [it, fresh] = state_first_row.emplace(state_id[i], i);
    if (fresh) continue;
    const std::size_t f = it->second;
    if (cohort[i] != cohort[f]) {
      throw DataError("cohort varies within state " + std::to_string(state_id[i]));
    }
    for (std::size_t k = 0; k < type_flags.size(); ++k) {
      if (type_flags[k][i] != type_flags[k][f]) {
        throw DataError("type flag " + type_names[k] + " varies within state " +
                        std::to_string(state_id[i]));
      }
    }
  }
  for (std::size_t k = 0; k < type_flags.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = type_flags[k][i];
      if (v != 0.0 && v != 1.0) throw DataError("type flag " + type_names[k] + " is not 0/1");
      if (v == 1.0 && cohort[i] == kNeverTreated) {
        throw DataError("never-treated state " + std::to_string(state_id[i]) +
                        " carries treatment type " + type_names[k]);
      }
    }
  }
}

PanelDataset apply_sample_window(const PanelDataset& data, int first_allowed, int last_allowed) {
  if (first_allowed > last_allowed) throw ConfigError("sample window: first > last");
  PanelDataset out = data.empty_like();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int c = data.cohort[i];
    if (c != kNeverTreated && c < first_allowed) continue;
    out.append_row(data, i);
    if (c != kNeverTreated && c > last_allowed) {
      const std::size_t r = out.size() - 1;
      out.cohort[r] = kNeverTreated;
      out.post[r] = 0;
      for (auto& col : out.type_flags) col[r] = 0.0;
    }
  }
  if (out.empty()) throw DataError("sample window removed every row");
  return out;
}

PanelDataset make_placebo(const PanelDataset& data, int shift_years) {
  if (shift_years < 1) throw DataError("placebo shift must be at least one year");
  PanelDataset out = data.empty_like();
  std::size_t treated_rows = 0;
  bool any_treated = false;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int c = data.cohort[i];
    if (c == kNeverTreated) {
      out.append_row(data, i);
      continue;
    }
    any_treated = true;
    if (data.year[i] >= c) continue;
    out.append_row(data, i);
    const std::size_t r = out.size() - 1;
    out.cohort[r] = c - shift_years;
    out.post[r] = data.year[i] >= c - shift_years ? 1 : 0;
    ++treated_rows;
  }
  if (any_treated && treated_rows == 0) {
    throw DataError("placebo panel has no treated pre-period rows");
  }
  return out;
}

}  // namespace tpreg::synth
