#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tpreg/pipeline/broadband.hpp"
#include "tpreg/synth/panel.hpp"

namespace tpreg::pipeline {

/// One state's telehealth law. Framing flags follow the statutory wording:
/// "at least the same" (floor), "does not exceed" (ceiling), "same rate as"
/// (parity), separately for the reimbursement (price) and the consumer cost.
struct LawRecord {
  int state_id = 0;
  std::optional<int> adoption_year;  // empty: never adopted
  bool price_at_least = false;
  bool price_does_not_exceed = false;
  bool price_same_rate = false;
  bool cost_at_least = false;
  bool cost_does_not_exceed = false;
  bool cost_same_rate = false;
};

/// Treatment type of a state's price (or cost) framing: "price_floor",
/// "price_ceiling", "price_parity" (or the cost_ analogues), nullopt when no
/// flag is set. Throws DataError when two flags of the same kind are set.
std::optional<std::string> price_type(const LawRecord& law);
std::optional<std::string> cost_type(const LawRecord& law);

struct OutcomeRecord {
  int county_id = 0;
  int state_id = 0;
  int year = 0;
  std::optional<double> outcome;  // missing outcomes are dropped and counted
  int metro = 0;
};

struct ControlTable {
  std::vector<std::string> names;
  std::vector<int> county_id;
  std::vector<int> year;
  std::vector<std::vector<double>> values;  // [row][control]
};

struct AssemblyReport {
  std::size_t rows = 0;
  std::size_t dropped_missing_outcome = 0;
  std::size_t outcome_without_broadband = 0;
  std::size_t outcome_without_controls = 0;
  std::size_t broadband_without_outcome = 0;
  std::size_t law_states_without_rows = 0;
};

struct AssembledPanel {
  synth::PanelDataset panel;
  AssemblyReport report;
};

/// Inner join of outcomes, broadband and controls on (county_id, year) with
/// the state law table. States absent from the table are never treated.
/// Types are the framings present in the table, in the order price_floor,
/// price_ceiling, price_parity, cost_floor, cost_ceiling, cost_parity.
/// Throws DataError on ambiguous framing, duplicate keys, a state listed
/// twice, or an empty join (with the mismatch counts in the message).
AssembledPanel assemble_panel(const BroadbandColumn& broadband,
                              const std::vector<OutcomeRecord>& outcomes,
                              const ControlTable& controls, const std::vector<LawRecord>& laws);

/// The raw input tables a panel would be assembled from. Panel types must be
/// named after framings (price_floor, ...). The broadband column carries the
/// panel's broadband_z as its transformed value.
struct RawTables {
  BroadbandColumn broadband;
  std::vector<OutcomeRecord> outcomes;
  ControlTable controls;
  std::vector<LawRecord> laws;
};
RawTables to_raw_tables(const synth::PanelDataset& panel);

// CSV forms.
//   outcomes: county_id,state_id,year,outcome,metro   (outcome may be blank or NA)
//   controls: county_id,year,<name>...
//   laws:     state_id,adoption_year,price_at_least,price_does_not_exceed,
//             price_same_rate,cost_at_least,cost_does_not_exceed,cost_same_rate
//   broadband column: county_id,year,broadband_z  (weighted optional)
std::vector<OutcomeRecord> read_outcomes_csv(std::istream& in);
ControlTable read_controls_csv(std::istream& in);
std::vector<LawRecord> read_laws_csv(std::istream& in);
BroadbandColumn read_broadband_column_csv(std::istream& in);

void write_outcomes_csv(std::ostream& out, const std::vector<OutcomeRecord>& rows);
void write_controls_csv(std::ostream& out, const ControlTable& table);
void write_laws_csv(std::ostream& out, const std::vector<LawRecord>& laws);

}  // namespace tpreg::pipeline
