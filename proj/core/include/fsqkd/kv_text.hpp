#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fsqkd {

/// One `[name]` block of `key = value` lines; order preserved.
struct KvSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;

  std::optional<std::string> find(std::string_view key) const;
  std::string get(std::string_view key) const;  // throws if missing
  double get_double(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;
  std::uint64_t get_u64(std::string_view key) const;
  void set(std::string key, std::string value);
};

/// Structured key-value text: `#` comments, optional `[section]` headers,
/// `key = value` lines. Entries before the first header land in a section
/// with an empty name.
struct KvDocument {
  std::vector<KvSection> sections;

  const KvSection* section(std::string_view name) const;
};

KvDocument parse_kv(std::string_view text);
std::string to_kv(const KvDocument& doc);

/// Reads `key = value` lines up to and including the first blank line.
/// Used for the text headers in front of binary payloads.
KvSection read_kv_header(std::istream& in);
void write_kv_header(std::ostream& out, const KvSection& header);

/// Shortest decimal form that round-trips a double.
std::string format_double(double v);

}  // namespace fsqkd
