#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tpreg::pipeline {

/// One county-year of the Tier-1 residential broadband measure. Either a
/// direct rate per 1000 households or a tier category 0-5; the rate wins
/// when both are present.
struct BroadbandRecord {
  int county_id = 0;
  int year = 0;
  std::optional<double> rate_per_1000;
  std::optional<int> tier_category;
  double households = 0.0;
};

enum class Transform { zscore, log_minmax, arcsinh };

/// "zscore", "log_minmax" or "arcsinh"; ConfigError otherwise.
Transform parse_transform(const std::string& name);
std::string transform_name(Transform t);

/// Midpoint per 1000 households of a tier category: 0, 100, 300, 500, 700,
/// 900 for categories 0..5. DataError outside that range.
double tier_midpoint(int category);

struct BroadbandOptions {
  Transform transform = Transform::zscore;
  /// z-score within each year instead of over the pooled sample.
  bool per_year = false;
};

/// Transformed broadband by (county, year), sorted by (county_id, year).
struct BroadbandColumn {
  std::vector<int> county_id;
  std::vector<int> year;
  std::vector<double> weighted;  // rate x households / 1000
  std::vector<double> value;     // after the transform

  Transform transform = Transform::zscore;
  bool per_year = false;
  // Pooled moments and range of the weighted values.
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  double min = 0.0;
  double max = 0.0;
  /// Offset of the log-min-max map, 1e-6 * (max - min); 0 for other transforms.
  double delta = 0.0;

  std::size_t size() const { return county_id.size(); }
};

/// hhweight = households / 1000, weighted = rate x hhweight, then
///   zscore:     (w - mean) / sd
///   log_minmax: ln((w - min + delta) / (max - min + delta))
///   arcsinh:    asinh(w)
/// Throws DataError for negative households, unknown categories, duplicate
/// keys, or fewer than two distinct weighted values (zscore and log_minmax,
/// and each year when per_year is set).
BroadbandColumn ingest_broadband(const std::vector<BroadbandRecord>& records,
                                 const BroadbandOptions& options = {});

/// Reads county_id,year,households plus tier1_per_1000 and/or
/// tier1_category (blank cells allowed in one of them).
std::vector<BroadbandRecord> read_broadband_csv(std::istream& in);

/// county_id,year,weighted,broadband_z
void write_broadband_csv(std::ostream& out, const BroadbandColumn& column);

}  // namespace tpreg::pipeline
