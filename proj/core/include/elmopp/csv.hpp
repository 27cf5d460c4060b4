#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace elmopp {

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// Parses a full string as a double; throws std::invalid_argument otherwise.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

/// Comma-delimited writer with `\n` line endings.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  CsvWriter& field(std::string_view s);
  CsvWriter& field(const char* s) { return field(std::string_view(s)); }
  CsvWriter& field(double v);
  CsvWriter& field(long long v);
  CsvWriter& field(unsigned long long v);
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(std::size_t v) { return field(static_cast<unsigned long long>(v)); }
  CsvWriter& field(bool v) { return field(std::string_view(v ? "true" : "false")); }
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);

}  // namespace elmopp
