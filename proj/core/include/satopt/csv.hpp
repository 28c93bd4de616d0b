#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace satopt {

/// Shortest decimal that parses back to the identical double; "nan", "inf"
/// and "-inf" for non-finite values.
std::string format_number(double v);

using CsvCell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

std::string format_cell(const CsvCell& cell);

/// Long-format CSV: a '#' comment line, the column header, then rows.
/// Strings containing a comma, quote or newline are quoted.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::string_view comment, std::vector<std::string> columns);

  /// Throws std::invalid_argument when the cell count differs from the header.
  void row(const std::vector<CsvCell>& cells);

  std::size_t rows_written() const { return rows_; }

 private:
  std::ostream& out_;
  std::vector<std::string> columns_;
  std::size_t rows_ = 0;
};

}  // namespace satopt
