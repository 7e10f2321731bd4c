#pragma once

#include <filesystem>

#include "fsqkd/bit_string.hpp"
#include "fsqkd/kv_text.hpp"

namespace fsqkd::cli {

// Text header (must contain bits = N) ended by a blank line, then the bits
// packed 8 per byte, MSB first.
struct KeyFile {
  KvSection header;
  BitString bits;
};

void write_key_file(const std::filesystem::path& path, const KeyFile& key);
KeyFile read_key_file(const std::filesystem::path& path);

}  // namespace fsqkd::cli
