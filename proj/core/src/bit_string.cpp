#include "fsqkd/bit_string.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace fsqkd {

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    if (b > 1) throw std::invalid_argument("BitString: element is not 0 or 1");
  }
}

BitString BitString::from_text(std::string_view text) {
  BitString out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1') {
      out.push_back(c == '1');
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("BitString: unexpected character in bit text");
    }
  }
  return out;
}

BitString BitString::from_packed(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
  if (bit_count > bytes.size() * 8) {
    throw std::invalid_argument("BitString: packed buffer shorter than bit count");
  }
  BitString out;
  out.bits_.resize(bit_count);
  for (std::size_t i = 0; i < bit_count; ++i) {
    out.bits_[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  }
  return out;
}

bool BitString::at(std::size_t i) const {
  if (i >= bits_.size()) throw std::out_of_range("BitString::at");
  return bits_[i] != 0;
}

void BitString::append(const BitString& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

std::size_t BitString::count_ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::size_t BitString::hamming_distance(const BitString& other) const {
  if (other.size() != size()) throw std::invalid_argument("BitString: size mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) d += bits_[i] ^ other.bits_[i];
  return d;
}

BitString BitString::slice(std::size_t offset, std::size_t count) const {
  if (offset > size() || count > size() - offset) throw std::out_of_range("BitString::slice");
  BitString out;
  out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(offset),
                   bits_.begin() + static_cast<std::ptrdiff_t>(offset + count));
  return out;
}

std::vector<std::uint8_t> BitString::to_packed() const {
  std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return out;
}

std::vector<std::uint64_t> BitString::to_words() const {
  std::vector<std::uint64_t> out((bits_.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    out[i / 64] |= static_cast<std::uint64_t>(bits_[i]) << (i % 64);
  }
  return out;
}

std::string BitString::to_text() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) s[i] = '1';
  }
  return s;
}

}  // namespace fsqkd
