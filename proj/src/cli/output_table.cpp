#include "codedelay/cli/output_table.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace codedelay::cli {

OutputTable::OutputTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void OutputTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw std::logic_error("row has " + std::to_string(row.size()) + " cells, table has " +
                           std::to_string(columns_.size()) + " columns");
  }
  rows_.push_back(std::move(row));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

void OutputTable::write(std::ostream& out, Format format) const {
  if (format == Format::kCsv) {
    write_csv(out);
  } else {
    write_json(out);
  }
}

void OutputTable::write_csv(std::ostream& out) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    out << (c ? "," : "") << csv_field(columns_[c]);
  }
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out << format_double(v);
            } else if constexpr (std::is_same_v<T, std::string>) {
              out << csv_field(v);
            } else {
              out << v;
            }
          },
          row[c]);
    }
    out << '\n';
  }
}

void OutputTable::write_json(std::ostream& out) const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              obj[columns_[c]] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json();
            } else {
              obj[columns_[c]] = v;
            }
          },
          row[c]);
    }
    doc.push_back(std::move(obj));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace codedelay::cli
