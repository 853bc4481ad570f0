#include "tpreg/pipeline/assemble.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <utility>

#include "tpreg/errors.hpp"
#include "tpreg/pipeline/csv.hpp"
#include "tpreg/synth/panel_csv.hpp"

namespace tpreg::pipeline {

namespace {

using Key = std::pair<int, int>;

const std::vector<std::string> kTypeOrder{"price_floor", "price_ceiling", "price_parity",
                                          "cost_floor",  "cost_ceiling",  "cost_parity"};

std::optional<std::string> framing(bool at_least, bool not_exceed, bool same_rate,
                                   const std::string& kind, int state) {
  if (int(at_least) + int(not_exceed) + int(same_rate) > 1) {
    throw DataError("law table: state " + std::to_string(state) + " sets more than one " + kind +
                    " framing flag (they are mutually exclusive)");
  }
  if (at_least) return kind + "_floor";
  if (not_exceed) return kind + "_ceiling";
  if (same_rate) return kind + "_parity";
  return std::nullopt;
}

std::string key_text(const Key& k) {
  return "county " + std::to_string(k.first) + " year " + std::to_string(k.second);
}

bool parse_flag(const std::string& cell, const std::string& what, std::size_t row) {
  if (cell.empty()) return false;
  const int v = parse_int(cell, what, row);
  if (v != 0 && v != 1) throw DataError(what + ": framing flags must be 0 or 1");
  return v == 1;
}

}  // namespace

std::optional<std::string> price_type(const LawRecord& l) {
  return framing(l.price_at_least, l.price_does_not_exceed, l.price_same_rate, "price", l.state_id);
}

std::optional<std::string> cost_type(const LawRecord& l) {
  return framing(l.cost_at_least, l.cost_does_not_exceed, l.cost_same_rate, "cost", l.state_id);
}

AssembledPanel assemble_panel(const BroadbandColumn& broadband,
                              const std::vector<OutcomeRecord>& outcomes,
                              const ControlTable& controls, const std::vector<LawRecord>& laws) {
  std::map<int, const LawRecord*> law_by_state;
  std::map<int, std::vector<std::string>> state_types;
  std::set<std::string> used_types;
  for (const auto& l : laws) {
    if (!law_by_state.emplace(l.state_id, &l).second) {
      throw DataError("law table: state " + std::to_string(l.state_id) + " is listed twice");
    }
    auto& types = state_types[l.state_id];
    for (const auto& t : {price_type(l), cost_type(l)}) {
      if (!t) continue;
      if (!l.adoption_year) {
        throw DataError("law table: state " + std::to_string(l.state_id) +
                        " has framing flags but no adoption year");
      }
      types.push_back(*t);
      used_types.insert(*t);
    }
  }

  std::map<Key, double> bb;
  for (std::size_t i = 0; i < broadband.size(); ++i) {
    const Key k{broadband.county_id[i], broadband.year[i]};
    if (!bb.emplace(k, broadband.value[i]).second) {
      throw DataError("broadband column: duplicate " + key_text(k));
    }
  }
  std::map<Key, std::size_t> ctrl;
  for (std::size_t i = 0; i < controls.county_id.size(); ++i) {
    const Key k{controls.county_id[i], controls.year[i]};
    if (controls.values[i].size() != controls.names.size()) {
      throw DataError("controls: row width differs from the header");
    }
    if (!ctrl.emplace(k, i).second) throw DataError("controls: duplicate " + key_text(k));
  }
  const bool need_controls = !controls.names.empty();

  AssembledPanel out;
  AssemblyReport& rep = out.report;
  synth::PanelDataset& p = out.panel;
  for (const auto& t : kTypeOrder) {
    if (used_types.count(t)) p.type_names.push_back(t);
  }
  p.type_flags.assign(p.type_names.size(), {});
  p.control_names = controls.names;
  p.controls.assign(controls.names.size(), {});

  std::set<Key> seen;
  std::set<Key> joined;
  std::set<int> states_with_rows;
  for (const auto& o : outcomes) {
    const Key k{o.county_id, o.year};
    if (!seen.insert(k).second) throw DataError("outcomes: duplicate " + key_text(k));
    states_with_rows.insert(o.state_id);
    if (!o.outcome) {
      ++rep.dropped_missing_outcome;
      continue;
    }
    const auto b = bb.find(k);
    if (b == bb.end()) {
      ++rep.outcome_without_broadband;
      continue;
    }
    const auto c = ctrl.find(k);
    if (need_controls && c == ctrl.end()) {
      ++rep.outcome_without_controls;
      continue;
    }
    joined.insert(k);

    const auto law = law_by_state.find(o.state_id);
    const int cohort = law != law_by_state.end() && law->second->adoption_year
                           ? *law->second->adoption_year
                           : synth::kNeverTreated;
    p.county_id.push_back(o.county_id);
    p.state_id.push_back(o.state_id);
    p.year.push_back(o.year);
    p.outcome.push_back(*o.outcome);
    p.cohort.push_back(cohort);
    p.post.push_back(cohort != synth::kNeverTreated && o.year >= cohort ? 1 : 0);
    p.broadband_z.push_back(b->second);
    p.metro.push_back(o.metro);
    const auto& types = state_types[o.state_id];
    for (std::size_t t = 0; t < p.type_names.size(); ++t) {
      const bool has = std::find(types.begin(), types.end(), p.type_names[t]) != types.end();
      p.type_flags[t].push_back(has ? 1.0 : 0.0);
    }
    for (std::size_t j = 0; j < controls.names.size(); ++j) {
      p.controls[j].push_back(controls.values[c->second][j]);
    }
  }
  for (const auto& [k, v] : bb) {
    if (!seen.count(k)) ++rep.broadband_without_outcome;
  }
  for (const auto& [state, law] : law_by_state) {
    if (!states_with_rows.count(state)) ++rep.law_states_without_rows;
  }
  rep.rows = p.size();
  if (p.empty()) {
    throw DataError("assemble_panel: the join is empty (" +
                    std::to_string(rep.outcome_without_broadband) + " outcome rows without broadband, " +
                    std::to_string(rep.outcome_without_controls) + " without controls, " +
                    std::to_string(rep.dropped_missing_outcome) + " with missing outcome, " +
                    std::to_string(rep.broadband_without_outcome) + " broadband rows without outcome)");
  }
  p.sort_canonical();
  p.validate();
  return out;
}

RawTables to_raw_tables(const synth::PanelDataset& panel) {
  RawTables t;
  t.controls.names = panel.control_names;
  t.broadband.transform = Transform::zscore;
  std::map<int, LawRecord> laws;
  for (std::size_t i = 0; i < panel.size(); ++i) {
    t.broadband.county_id.push_back(panel.county_id[i]);
    t.broadband.year.push_back(panel.year[i]);
    t.broadband.weighted.push_back(panel.broadband_z[i]);
    t.broadband.value.push_back(panel.broadband_z[i]);
    t.outcomes.push_back({panel.county_id[i], panel.state_id[i], panel.year[i], panel.outcome[i],
                          panel.metro[i]});
    t.controls.county_id.push_back(panel.county_id[i]);
    t.controls.year.push_back(panel.year[i]);
    std::vector<double> row;
    for (const auto& c : panel.controls) row.push_back(c[i]);
    t.controls.values.push_back(std::move(row));

    if (!panel.treated(i) || laws.count(panel.state_id[i])) continue;
    LawRecord l;
    l.state_id = panel.state_id[i];
    l.adoption_year = panel.cohort[i];
    for (std::size_t k = 0; k < panel.type_names.size(); ++k) {
      if (panel.type_flags[k][i] != 1.0) continue;
      const std::string& name = panel.type_names[k];
      if (name == "price_floor") l.price_at_least = true;
      else if (name == "price_ceiling") l.price_does_not_exceed = true;
      else if (name == "price_parity") l.price_same_rate = true;
      else if (name == "cost_floor") l.cost_at_least = true;
      else if (name == "cost_ceiling") l.cost_does_not_exceed = true;
      else if (name == "cost_parity") l.cost_same_rate = true;
      else throw DataError("to_raw_tables: type \"" + name + "\" is not a law framing");
    }
    laws.emplace(l.state_id, l);
  }
  for (const auto& [s, l] : laws) t.laws.push_back(l);
  return t;
}

std::vector<OutcomeRecord> read_outcomes_csv(std::istream& in) {
  const std::string what = "outcomes";
  const CsvTable t = read_csv(in, what);
  const std::size_t cc = t.require("county_id", what), cs = t.require("state_id", what),
                    cy = t.require("year", what), co = t.require("outcome", what);
  const int cm = t.column("metro");
  std::vector<OutcomeRecord> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    OutcomeRecord o;
    o.county_id = parse_int(row[cc], what, r);
    o.state_id = parse_int(row[cs], what, r);
    o.year = parse_int(row[cy], what, r);
    if (!row[co].empty() && row[co] != "NA") o.outcome = parse_real(row[co], what, r);
    if (cm >= 0 && !row[cm].empty()) o.metro = parse_int(row[cm], what, r);
    out.push_back(o);
  }
  return out;
}

ControlTable read_controls_csv(std::istream& in) {
  const std::string what = "controls";
  const CsvTable t = read_csv(in, what);
  const std::size_t cc = t.require("county_id", what), cy = t.require("year", what);
  ControlTable out;
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (j == cc || j == cy) continue;
    out.names.push_back(t.header[j]);
    cols.push_back(j);
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out.county_id.push_back(parse_int(t.rows[r][cc], what, r));
    out.year.push_back(parse_int(t.rows[r][cy], what, r));
    std::vector<double> v;
    for (std::size_t j : cols) v.push_back(parse_real(t.rows[r][j], what, r));
    out.values.push_back(std::move(v));
  }
  return out;
}

std::vector<LawRecord> read_laws_csv(std::istream& in) {
  const std::string what = "laws";
  const CsvTable t = read_csv(in, what);
  const std::size_t cs = t.require("state_id", what), ca = t.require("adoption_year", what);
  const char* const flags[] = {"price_at_least", "price_does_not_exceed", "price_same_rate",
                               "cost_at_least",  "cost_does_not_exceed",  "cost_same_rate"};
  int pos[6];
  for (int f = 0; f < 6; ++f) pos[f] = t.column(flags[f]);
  std::vector<LawRecord> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    LawRecord l;
    l.state_id = parse_int(row[cs], what, r);
    if (!row[ca].empty() && row[ca] != "never" && row[ca] != "NA") {
      l.adoption_year = parse_int(row[ca], what, r);
    }
    bool* targets[] = {&l.price_at_least, &l.price_does_not_exceed, &l.price_same_rate,
                       &l.cost_at_least,  &l.cost_does_not_exceed,  &l.cost_same_rate};
    for (int f = 0; f < 6; ++f) {
      if (pos[f] >= 0) *targets[f] = parse_flag(row[static_cast<std::size_t>(pos[f])], what, r);
    }
    out.push_back(l);
  }
  return out;
}

BroadbandColumn read_broadband_column_csv(std::istream& in) {
  const std::string what = "broadband column";
  const CsvTable t = read_csv(in, what);
  const std::size_t cc = t.require("county_id", what), cy = t.require("year", what),
                    cv = t.require("broadband_z", what);
  const int cw = t.column("weighted");
  BroadbandColumn out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out.county_id.push_back(parse_int(t.rows[r][cc], what, r));
    out.year.push_back(parse_int(t.rows[r][cy], what, r));
    const double v = parse_real(t.rows[r][cv], what, r);
    out.value.push_back(v);
    out.weighted.push_back(cw >= 0 ? parse_real(t.rows[r][static_cast<std::size_t>(cw)], what, r) : v);
  }
  return out;
}

void write_outcomes_csv(std::ostream& out, const std::vector<OutcomeRecord>& rows) {
  out << "county_id,state_id,year,outcome,metro\n";
  for (const auto& o : rows) {
    out << o.county_id << ',' << o.state_id << ',' << o.year << ','
        << (o.outcome ? synth::format_real(*o.outcome) : std::string("NA")) << ',' << o.metro << '\n';
  }
}

void write_controls_csv(std::ostream& out, const ControlTable& t) {
  out << "county_id,year";
  for (const auto& n : t.names) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < t.county_id.size(); ++r) {
    out << t.county_id[r] << ',' << t.year[r];
    for (double v : t.values[r]) out << ',' << synth::format_real(v);
    out << '\n';
  }
}

void write_laws_csv(std::ostream& out, const std::vector<LawRecord>& laws) {
  out << "state_id,adoption_year,price_at_least,price_does_not_exceed,price_same_rate,"
         "cost_at_least,cost_does_not_exceed,cost_same_rate\n";
  for (const auto& l : laws) {
    out << l.state_id << ',' << (l.adoption_year ? std::to_string(*l.adoption_year) : "never") << ','
        << l.price_at_least << ',' << l.price_does_not_exceed << ',' << l.price_same_rate << ','
        << l.cost_at_least << ',' << l.cost_does_not_exceed << ',' << l.cost_same_rate << '\n';
  }
}

}  // namespace tpreg::pipeline
