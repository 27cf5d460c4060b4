#include "elmopp/kvfile.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace elmopp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::optional<std::string_view> KvSection::get(std::string_view key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return std::string_view(v);
  }
  return std::nullopt;
}

void KvSection::set(std::string key, std::string value) {
  for (auto& [k, v] : entries) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries.emplace_back(std::move(key), std::move(value));
}

const KvSection* KvDocument::find(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

KvSection& KvDocument::add(std::string name) {
  sections.push_back(KvSection{std::move(name), {}});
  return sections.back();
}

KvDocument parse_kv(std::istream& in) {
  KvDocument doc;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw KvParseError(line_no, "malformed section header '" + std::string(line) + "'");
      }
      doc.add(std::string(trim(line.substr(1, line.size() - 2))));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw KvParseError(line_no, "expected 'key = value', got '" + std::string(line) + "'");
    }
    if (doc.sections.empty()) {
      throw KvParseError(line_no, "key outside of any section");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw KvParseError(line_no, "empty key");
    auto& section = doc.sections.back();
    if (section.get(key)) {
      throw KvParseError(line_no, "duplicate key '" + std::string(key) + "' in [" +
                                      section.name + "]");
    }
    section.entries.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return doc;
}

KvDocument parse_kv_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_kv(in);
}

void write_kv(std::ostream& out, const KvDocument& doc) {
  bool first = true;
  for (const auto& s : doc.sections) {
    if (!first) out << '\n';
    first = false;
    out << '[' << s.name << "]\n";
    for (const auto& [k, v] : s.entries) out << k << " = " << v << '\n';
  }
}

std::string write_kv_string(const KvDocument& doc) {
  std::ostringstream out;
  write_kv(out, doc);
  return out.str();
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> items;
  if (trim(value).empty()) return items;
  std::size_t start = 0;
  while (true) {
    const auto comma = value.find(',', start);
    items.emplace_back(trim(value.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

}  // namespace elmopp
