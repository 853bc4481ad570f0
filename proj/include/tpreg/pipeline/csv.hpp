#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace tpreg::pipeline {

/// A header-indexed CSV table of raw string cells. No quoting support; the
/// exchange files here are plain numeric tables.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position by name, or -1.
  int column(const std::string& name) const;
  /// Column position by name; DataError naming `what` when absent.
  std::size_t require(const std::string& name, const std::string& what) const;
};

/// Splits on commas, trims surrounding whitespace and CR, skips blank lines.
/// Throws DataError when a row has the wrong number of cells.
CsvTable read_csv(std::istream& in, const std::string& what);
CsvTable read_csv_file(const std::string& path);

/// Integer or real cell; DataError mentioning `what` and the row on failure.
int parse_int(const std::string& cell, const std::string& what, std::size_t row);
double parse_real(const std::string& cell, const std::string& what, std::size_t row);

/// Writes through a temporary file in the target directory and renames it
/// into place, so the target is either absent, the old file, or complete.
void write_atomically(const std::string& path, const std::function<void(std::ostream&)>& writer);

}  // namespace tpreg::pipeline
