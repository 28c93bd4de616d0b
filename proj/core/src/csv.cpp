#include "satopt/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace satopt {

namespace {

std::string quote(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_cell(const CsvCell& cell) {
  struct Visitor {
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const { return quote(s); }
  };
  return std::visit(Visitor{}, cell);
}

CsvWriter::CsvWriter(std::ostream& out, std::string_view comment, std::vector<std::string> columns)
    : out_(out), columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("CsvWriter: no columns");
  std::string line = "# ";
  for (char c : comment) line += (c == '\n' || c == '\r') ? ' ' : c;
  out_ << line << '\n';
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote(columns_[i]);
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != columns_.size()) {
    throw std::invalid_argument("CsvWriter: row has " + std::to_string(cells.size()) +
                                " cells, header has " + std::to_string(columns_.size()));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << format_cell(cells[i]);
  }
  out_ << '\n';
  ++rows_;
}

}  // namespace satopt
