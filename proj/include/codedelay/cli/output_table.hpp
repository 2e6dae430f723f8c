#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace codedelay::cli {

using Cell = std::variant<double, std::int64_t, std::string>;

enum class Format { kCsv, kJson };

/// Rectangular table of scalars; every row has one cell per column.
class OutputTable {
 public:
  explicit OutputTable(std::vector<std::string> columns);

  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  void write(std::ostream& out, Format format) const;
  void write_csv(std::ostream& out) const;
  /// Array of objects keyed by column; non-finite numbers become null.
  void write_json(std::ostream& out) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// CSV field with quoting when it contains a separator, quote or newline.
std::string csv_field(const std::string& s);

}  // namespace codedelay::cli
