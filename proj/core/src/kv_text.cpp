#include "fsqkd/kv_text.hpp"

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fsqkd {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::pair<std::string, std::string> parse_entry(std::string_view line, std::size_t line_no) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) {
    throw std::runtime_error("key-value text line " + std::to_string(line_no) + ": missing '='");
  }
  auto key = trim(line.substr(0, eq));
  if (key.empty()) {
    throw std::runtime_error("key-value text line " + std::to_string(line_no) + ": empty key");
  }
  return {std::string(key), std::string(trim(line.substr(eq + 1)))};
}

}  // namespace

std::optional<std::string> KvSection::find(std::string_view key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string KvSection::get(std::string_view key) const {
  auto v = find(key);
  if (!v) throw std::runtime_error("missing key '" + std::string(key) + "' in [" + name + "]");
  return *v;
}

double KvSection::get_double(std::string_view key) const {
  const auto v = get(key);
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) throw std::runtime_error("key '" + std::string(key) + "': not a number");
  return d;
}

double KvSection::get_double(std::string_view key, double fallback) const {
  return find(key) ? get_double(key) : fallback;
}

std::uint64_t KvSection::get_u64(std::string_view key) const {
  const auto v = get(key);
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw std::runtime_error("key '" + std::string(key) + "': not an unsigned integer");
  }
  return out;
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

const KvSection* KvDocument::section(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

KvDocument parse_kv(std::string_view text) {
  KvDocument doc;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::runtime_error("key-value text line " + std::to_string(line_no) + ": bad section header");
      }
      doc.sections.push_back(KvSection{std::string(trim(line.substr(1, line.size() - 2))), {}});
      continue;
    }
    if (doc.sections.empty()) doc.sections.push_back(KvSection{});
    auto [k, v] = parse_entry(line, line_no);
    doc.sections.back().set(std::move(k), std::move(v));
  }
  return doc;
}

std::string to_kv(const KvDocument& doc) {
  std::ostringstream out;
  bool first = true;
  for (const auto& s : doc.sections) {
    if (!first) out << '\n';
    first = false;
    if (!s.name.empty()) out << '[' << s.name << "]\n";
    for (const auto& [k, v] : s.entries) out << k << " = " << v << '\n';
  }
  return out.str();
}

KvSection read_kv_header(std::istream& in) {
  KvSection header;
  std::string line;
  std::size_t line_no = 0;
  bool terminated = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty()) {
      terminated = true;
      break;
    }
    if (t.front() == '#') continue;
    auto [k, v] = parse_entry(t, line_no);
    header.set(std::move(k), std::move(v));
  }
  if (!terminated) throw std::runtime_error("text header not terminated by a blank line");
  return header;
}

void write_kv_header(std::ostream& out, const KvSection& header) {
  for (const auto& [k, v] : header.entries) out << k << " = " << v << '\n';
  out << '\n';
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

}  // namespace fsqkd
