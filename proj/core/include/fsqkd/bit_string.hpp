#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fsqkd {

/// Ordered sequence of key bits. One byte per bit internally (values 0/1);
/// packing to the 8-bits-per-byte form happens only at I/O boundaries.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t n, bool value = false) : bits_(n, value ? 1 : 0) {}
  explicit BitString(std::vector<std::uint8_t> bits);

  /// Parses "0101..." (whitespace ignored).
  static BitString from_text(std::string_view text);
  /// Unpacks `bit_count` bits, most-significant-bit first.
  static BitString from_packed(std::span<const std::uint8_t> bytes, std::size_t bit_count);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  bool at(std::size_t i) const;
  void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }
  void push_back(bool value) { bits_.push_back(value ? 1 : 0); }
  void append(const BitString& other);
  void reserve(std::size_t n) { bits_.reserve(n); }

  std::size_t count_ones() const;
  /// Number of positions where the two strings differ; sizes must match.
  std::size_t hamming_distance(const BitString& other) const;

  BitString slice(std::size_t offset, std::size_t count) const;
  /// Packs MSB-first; the final byte is zero-padded.
  std::vector<std::uint8_t> to_packed() const;
  /// Packs into 64-bit words, bit i at word i/64, position i%64.
  std::vector<std::uint64_t> to_words() const;
  std::string to_text() const;

  std::span<const std::uint8_t> raw() const { return bits_; }

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace fsqkd
