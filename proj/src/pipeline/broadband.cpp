#include "tpreg/pipeline/broadband.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <utility>

#include "tpreg/errors.hpp"
#include "tpreg/pipeline/csv.hpp"
#include "tpreg/synth/panel_csv.hpp"

namespace tpreg::pipeline {

Transform parse_transform(const std::string& name) {
  if (name == "zscore") return Transform::zscore;
  if (name == "log_minmax") return Transform::log_minmax;
  if (name == "arcsinh") return Transform::arcsinh;
  throw ConfigError("unknown broadband transform \"" + name +
                    "\" (expected zscore, log_minmax or arcsinh)");
}

std::string transform_name(Transform t) {
  switch (t) {
    case Transform::zscore: return "zscore";
    case Transform::log_minmax: return "log_minmax";
    case Transform::arcsinh: return "arcsinh";
  }
  return "zscore";
}

double tier_midpoint(int category) {
  static constexpr double kMid[] = {0.0, 100.0, 300.0, 500.0, 700.0, 900.0};
  if (category < 0 || category > 5) {
    throw DataError("broadband tier category " + std::to_string(category) + " is outside 0..5");
  }
  return kMid[category];
}

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(const std::vector<double>& v, const std::vector<std::size_t>& idx,
                const std::string& what) {
  std::set<double> distinct;
  for (std::size_t i : idx) distinct.insert(v[i]);
  if (distinct.size() < 2) {
    throw DataError(what + ": fewer than two distinct weighted broadband values (zero variance)");
  }
  Moments m;
  for (std::size_t i : idx) m.mean += v[i];
  m.mean /= static_cast<double>(idx.size());
  double ss = 0.0;
  for (std::size_t i : idx) ss += (v[i] - m.mean) * (v[i] - m.mean);
  m.sd = std::sqrt(ss / static_cast<double>(idx.size() - 1));
  if (!(m.sd > 0.0)) throw DataError(what + ": zero variance");
  return m;
}

}  // namespace

BroadbandColumn ingest_broadband(const std::vector<BroadbandRecord>& records,
                                 const BroadbandOptions& options) {
  if (records.empty()) throw DataError("ingest_broadband: no records");
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::pair(records[a].county_id, records[a].year) <
           std::pair(records[b].county_id, records[b].year);
  });

  BroadbandColumn out;
  out.transform = options.transform;
  out.per_year = options.per_year;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const BroadbandRecord& r = records[order[pos]];
    const std::string key = "county " + std::to_string(r.county_id) + " year " + std::to_string(r.year);
    if (pos > 0 && out.county_id.back() == r.county_id && out.year.back() == r.year) {
      throw DataError("ingest_broadband: duplicate record for " + key);
    }
    if (!(r.households >= 0.0) || !std::isfinite(r.households)) {
      throw DataError("ingest_broadband: negative household count for " + key);
    }
    double rate = 0.0;
    if (r.rate_per_1000) {
      rate = *r.rate_per_1000;
      if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw DataError("ingest_broadband: negative or non-finite rate for " + key);
      }
    } else if (r.tier_category) {
      rate = tier_midpoint(*r.tier_category);
    } else {
      throw DataError("ingest_broadband: neither a rate nor a tier category for " + key);
    }
    out.county_id.push_back(r.county_id);
    out.year.push_back(r.year);
    out.weighted.push_back(rate * (r.households / 1000.0));
  }

  const std::size_t n = out.size();
  const auto [lo, hi] = std::minmax_element(out.weighted.begin(), out.weighted.end());
  out.min = *lo;
  out.max = *hi;
  {
    double s = 0.0;
    for (double w : out.weighted) s += w;
    out.mean = s / static_cast<double>(n);
    double ss = 0.0;
    for (double w : out.weighted) ss += (w - out.mean) * (w - out.mean);
    out.sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  }
  out.value.resize(n);

  switch (options.transform) {
    case Transform::zscore: {
      std::map<int, std::vector<std::size_t>> groups;
      for (std::size_t i = 0; i < n; ++i) groups[options.per_year ? out.year[i] : 0].push_back(i);
      for (const auto& [year, idx] : groups) {
        const std::string what = options.per_year ? "z-score for year " + std::to_string(year)
                                                  : std::string("z-score");
        const Moments m = moments(out.weighted, idx, what);
        for (std::size_t i : idx) out.value[i] = (out.weighted[i] - m.mean) / m.sd;
      }
      break;
    }
    case Transform::log_minmax: {
      std::vector<std::size_t> all(n);
      std::iota(all.begin(), all.end(), 0);
      moments(out.weighted, all, "log min-max");
      const double range = out.max - out.min;
      out.delta = 1e-6 * range;
      for (std::size_t i = 0; i < n; ++i) {
        out.value[i] = std::log((out.weighted[i] - out.min + out.delta) / (range + out.delta));
      }
      break;
    }
    case Transform::arcsinh:
      for (std::size_t i = 0; i < n; ++i) out.value[i] = std::asinh(out.weighted[i]);
      break;
  }
  return out;
}

std::vector<BroadbandRecord> read_broadband_csv(std::istream& in) {
  const std::string what = "broadband records";
  const CsvTable t = read_csv(in, what);
  const std::size_t c_county = t.require("county_id", what);
  const std::size_t c_year = t.require("year", what);
  const std::size_t c_hh = t.require("households", what);
  const int c_rate = t.column("tier1_per_1000");
  const int c_cat = t.column("tier1_category");
  if (c_rate < 0 && c_cat < 0) {
    throw DataError(what + ": need a tier1_per_1000 or tier1_category column");
  }
  std::vector<BroadbandRecord> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    BroadbandRecord rec;
    rec.county_id = parse_int(row[c_county], what, r);
    rec.year = parse_int(row[c_year], what, r);
    rec.households = parse_real(row[c_hh], what, r);
    if (c_rate >= 0 && !row[c_rate].empty()) rec.rate_per_1000 = parse_real(row[c_rate], what, r);
    if (c_cat >= 0 && !row[c_cat].empty()) rec.tier_category = parse_int(row[c_cat], what, r);
    out.push_back(rec);
  }
  return out;
}

void write_broadband_csv(std::ostream& out, const BroadbandColumn& c) {
  using synth::format_real;
  out << "county_id,year,weighted,broadband_z\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    out << c.county_id[i] << ',' << c.year[i] << ',' << format_real(c.weighted[i]) << ','
        << format_real(c.value[i]) << '\n';
  }
}

}  // namespace tpreg::pipeline
