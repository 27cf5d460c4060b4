#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace elmopp {

/// Line-oriented text format shared by graph descriptions and run configs:
///
///   # comment
///   [section]
///   key = value
///
/// Sections may repeat; order of sections and keys is preserved.
struct KvSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;

  std::optional<std::string_view> get(std::string_view key) const;
  void set(std::string key, std::string value);

  friend bool operator==(const KvSection&, const KvSection&) = default;
};

struct KvDocument {
  std::vector<KvSection> sections;

  const KvSection* find(std::string_view name) const;
  KvSection& add(std::string name);

  friend bool operator==(const KvDocument&, const KvDocument&) = default;
};

class KvParseError : public std::runtime_error {
 public:
  KvParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

KvDocument parse_kv(std::istream& in);
KvDocument parse_kv_string(std::string_view text);
void write_kv(std::ostream& out, const KvDocument& doc);
std::string write_kv_string(const KvDocument& doc);

/// Splits on commas and trims whitespace; empty input yields no items.
std::vector<std::string> split_list(std::string_view value);

}  // namespace elmopp
