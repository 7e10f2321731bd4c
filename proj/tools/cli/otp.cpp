#include "otp.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include "fsqkd/kv_text.hpp"
#include "key_file.hpp"

namespace fsqkd::cli {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

OtpLedger::OtpLedger(std::filesystem::path key_path) : path_(key_path.string() + ".ledger") {
  std::ifstream in(path_);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string op;
    KeyRange r;
    if (!(ls >> op >> r.offset >> r.length) || (op != "encrypt" && op != "decrypt")) {
      throw OtpError(path_.string() + ":" + std::to_string(lineno) + ": malformed ledger line");
    }
    (op == "encrypt" ? enc_ : dec_).push_back(r);
  }
}

std::uint64_t OtpLedger::next_free(std::uint64_t length) const {
  auto sorted = enc_;
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.offset < b.offset; });
  std::uint64_t at = 0;
  for (const auto& r : sorted) {
    if (r.length == 0) continue;
    if (at + length <= r.offset) return at;
    at = std::max(at, r.end());
  }
  return at;
}

bool OtpLedger::overlaps(bool encrypt, KeyRange r) const {
  if (r.length == 0) return false;
  for (const auto& s : spent(encrypt)) {
    if (s.length && r.offset < s.end() && s.offset < r.end()) return true;
  }
  return false;
}

void OtpLedger::mark(bool encrypt, KeyRange r) {
  if (overlaps(encrypt, r)) {
    throw OtpError("key bits [" + std::to_string(r.offset) + ", " + std::to_string(r.end()) +
                   ") already used for " + (encrypt ? "encryption" : "decryption"));
  }
  std::ofstream out(path_, std::ios::app);
  out << (encrypt ? "encrypt " : "decrypt ") << r.offset << ' ' << r.length << '\n';
  out.flush();
  if (!out) throw OtpError("cannot update ledger " + path_.string());
  (encrypt ? enc_ : dec_).push_back(r);
}

namespace {

void xor_with_key(std::vector<std::uint8_t>& data, const BitString& key, std::uint64_t offset) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::uint8_t k = 0;
    for (int b = 0; b < 8; ++b) k = static_cast<std::uint8_t>((k << 1) | key[offset + 8 * i + b]);
    data[i] ^= k;
  }
}

}  // namespace

void otp_encrypt(const std::filesystem::path& key_path, const std::filesystem::path& message,
                 const std::filesystem::path& out) {
  const auto key = read_key_file(key_path);
  auto data = read_bytes(message);
  OtpLedger ledger(key_path);
  const std::uint64_t nbits = 8ull * data.size();
  KeyRange r{nbits ? ledger.next_free(nbits) : 0, nbits};
  if (r.end() > key.bits.size()) {
    throw OtpError("insufficient key: message needs " + std::to_string(nbits) + " bits, " +
                   std::to_string(key.bits.size() - std::min<std::uint64_t>(r.offset, key.bits.size())) +
                   " unspent bits remain");
  }
  xor_with_key(data, key.bits, r.offset);
  if (nbits) ledger.mark(true, r);

  std::ofstream o(out, std::ios::binary | std::ios::trunc);
  if (!o) throw std::runtime_error("cannot write " + out.string());
  KvSection h;
  h.set("format", "fsqkd-otp");
  h.set("version", "1");
  h.set("key_offset", std::to_string(r.offset));
  h.set("bits", std::to_string(nbits));
  write_kv_header(o, h);
  o.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

void otp_decrypt(const std::filesystem::path& key_path, const std::filesystem::path& ciphertext,
                 const std::filesystem::path& out) {
  const auto key = read_key_file(key_path);
  std::ifstream in(ciphertext, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + ciphertext.string());
  const auto h = read_kv_header(in);
  if (h.get("format") != "fsqkd-otp") throw OtpError("not an fsqkd-otp ciphertext");
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const KeyRange r{h.get_u64("key_offset"), h.get_u64("bits")};
  if (r.length != 8ull * data.size()) throw OtpError("ciphertext length does not match its header");
  if (r.end() > key.bits.size()) throw OtpError("insufficient key for the recorded key range");
  OtpLedger ledger(key_path);
  if (r.length) ledger.mark(false, r);
  xor_with_key(data, key.bits, r.offset);
  write_bytes(out, data);
}

}  // namespace fsqkd::cli
