#pragma once

#include <string>
#include <vector>

namespace qgp::scenario {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// UTC time as 2026-01-31T12:00:00Z.
std::string utc_timestamp();

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }
  void add_row(const std::vector<double>& values);
  /// Header line plus rows, newline terminated.
  std::string body() const;

 private:
  std::vector<std::string> columns_;
  std::string rows_;
};

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::string& path, const std::string& contents);

}  // namespace qgp::scenario
