#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsqkd::cli {

class OtpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeyRange {
  std::uint64_t offset = 0;  // in bits
  std::uint64_t length = 0;
  std::uint64_t end() const { return offset + length; }
};

// Sidecar ledger next to a key file (<key>.ledger). One line per use:
// "encrypt <offset> <length>" or "decrypt <offset> <length>".
class OtpLedger {
 public:
  explicit OtpLedger(std::filesystem::path key_path);

  const std::filesystem::path& path() const { return path_; }
  const std::vector<KeyRange>& spent(bool encrypt) const { return encrypt ? enc_ : dec_; }

  // Lowest offset from which `length` unspent encryption bits follow.
  std::uint64_t next_free(std::uint64_t length) const;
  bool overlaps(bool encrypt, KeyRange r) const;
  // Appends to the ledger file; throws OtpError if the range was used.
  void mark(bool encrypt, KeyRange r);

 private:
  std::filesystem::path path_;
  std::vector<KeyRange> enc_;
  std::vector<KeyRange> dec_;
};

// Ciphertext file: header (format, key_offset, bits) then XOR-ed bytes.
// Both refuse short keys and spent ranges.
void otp_encrypt(const std::filesystem::path& key_path, const std::filesystem::path& message,
                 const std::filesystem::path& out);
void otp_decrypt(const std::filesystem::path& key_path, const std::filesystem::path& ciphertext,
                 const std::filesystem::path& out);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p);
void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes);

}  // namespace fsqkd::cli
