#include "tpreg/synth/panel_csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <vector>

#include "tpreg/errors.hpp"

namespace tpreg::synth {

namespace {

const char* const kFixedColumns[] = {"county_id", "state_id", "year",        "outcome",
                                     "cohort",    "post",     "rel_time",    "broadband_z",
                                     "metro",     "cluster_id"};
constexpr std::size_t kFixedCount = std::size(kFixedColumns);

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

int parse_int(const std::string& s, std::size_t line, const char* column) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("panel CSV line " + std::to_string(line) + ": bad integer in " + column +
                    ": \"" + s + "\"");
  }
  return value;
}

double parse_real(const std::string& s, std::size_t line, const std::string& column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("panel CSV line " + std::to_string(line) + ": bad number in " + column +
                    ": \"" + s + "\"");
  }
}

}  // namespace

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_panel_csv(std::ostream& out, const PanelDataset& d) {
  for (std::size_t c = 0; c < kFixedCount; ++c) out << (c ? "," : "") << kFixedColumns[c];
  for (const auto& name : d.type_names) out << ",type_" << name;
  for (const auto& name : d.control_names) out << ",control_" << name;
  out << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << d.county_id[i] << ',' << d.state_id[i] << ',' << d.year[i] << ','
        << format_real(d.outcome[i]) << ',';
    if (d.treated(i)) {
      out << d.cohort[i] << ',' << d.post[i] << ',' << (d.year[i] - d.cohort[i]);
    } else {
      out << "never," << d.post[i] << ",NA";
    }
    out << ',' << format_real(d.broadband_z[i]) << ',' << d.metro[i] << ',' << d.state_id[i];
    for (const auto& col : d.type_flags) out << ',' << format_real(col[i]);
    for (const auto& col : d.controls) out << ',' << format_real(col[i]);
    out << '\n';
  }
}

PanelDataset read_panel_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("panel CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);
  if (header.size() < kFixedCount) throw DataError("panel CSV header is too short");
  for (std::size_t c = 0; c < kFixedCount; ++c) {
    if (header[c] != kFixedColumns[c]) {
      throw DataError("panel CSV header: expected column \"" + std::string(kFixedColumns[c]) +
                      "\" at position " + std::to_string(c) + ", found \"" + header[c] + "\"");
    }
  }
  PanelDataset d;
  std::size_t n_types = 0;
  for (std::size_t c = kFixedCount; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (h.rfind("type_", 0) == 0 && d.control_names.empty()) {
      d.type_names.push_back(h.substr(5));
      ++n_types;
    } else if (h.rfind("control_", 0) == 0) {
      d.control_names.push_back(h.substr(8));
    } else {
      throw DataError("panel CSV header: unexpected column \"" + h + "\"");
    }
  }
  d.type_flags.assign(d.type_names.size(), {});
  d.controls.assign(d.control_names.size(), {});

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw DataError("panel CSV line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(cells.size()));
    }
    d.county_id.push_back(parse_int(cells[0], line_no, "county_id"));
    d.state_id.push_back(parse_int(cells[1], line_no, "state_id"));
    d.year.push_back(parse_int(cells[2], line_no, "year"));
    d.outcome.push_back(parse_real(cells[3], line_no, "outcome"));
    d.cohort.push_back(cells[4] == "never" ? kNeverTreated : parse_int(cells[4], line_no, "cohort"));
    d.post.push_back(parse_int(cells[5], line_no, "post"));
    d.broadband_z.push_back(parse_real(cells[7], line_no, "broadband_z"));
    d.metro.push_back(parse_int(cells[8], line_no, "metro"));
    if (parse_int(cells[9], line_no, "cluster_id") != d.state_id.back()) {
      throw DataError("panel CSV line " + std::to_string(line_no) +
                      ": cluster_id differs from state_id");
    }
    const std::size_t r = d.size() - 1;
    const std::string expected_rel =
        d.cohort[r] == kNeverTreated ? "NA" : std::to_string(d.year[r] - d.cohort[r]);
    if (cells[6] != expected_rel) {
      throw DataError("panel CSV line " + std::to_string(line_no) +
                      ": rel_time inconsistent with year and cohort");
    }
    for (std::size_t k = 0; k < n_types; ++k) {
      d.type_flags[k].push_back(parse_real(cells[kFixedCount + k], line_no, header[kFixedCount + k]));
    }
    for (std::size_t c = 0; c < d.control_names.size(); ++c) {
      const std::size_t col = kFixedCount + n_types + c;
      d.controls[c].push_back(parse_real(cells[col], line_no, header[col]));
    }
  }
  d.validate();
  return d;
}

PanelDataset read_panel_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open panel CSV " + path);
  return read_panel_csv(in);
}

}  // namespace tpreg::synth
