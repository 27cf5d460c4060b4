#include "elmopp/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace elmopp {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

long long parse_int(std::string_view s) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

CsvWriter& CsvWriter::field(std::string_view s) {
  if (in_row_++) out_ << ',';
  out_ << s;
  return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(std::string_view(format_double(v))); }

CsvWriter& CsvWriter::field(long long v) { return field(std::string_view(std::to_string(v))); }

CsvWriter& CsvWriter::field(unsigned long long v) {
  return field(std::string_view(std::to_string(v)));
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw std::logic_error("CsvWriter: row has " + std::to_string(in_row_) + " fields, header has " +
                           std::to_string(columns_));
  }
  out_ << '\n';
  in_row_ = 0;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("csv: no column '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  table.header = split_row(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_row(line);
    if (row.size() != table.header.size()) {
      throw std::runtime_error("csv: row width " + std::to_string(row.size()) +
                               " does not match header width " +
                               std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace elmopp
