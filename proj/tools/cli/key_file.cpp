#include "key_file.hpp"

#include <fstream>
#include <iterator>
#include <stdexcept>

namespace fsqkd::cli {

void write_key_file(const std::filesystem::path& path, const KeyFile& key) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  KvSection h = key.header;
  h.set("bits", std::to_string(key.bits.size()));
  write_kv_header(out, h);
  const auto packed = key.bits.to_packed();
  out.write(reinterpret_cast<const char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

KeyFile read_key_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  KeyFile k;
  k.header = read_kv_header(in);
  const auto nbits = k.header.get_u64("bits");
  std::vector<std::uint8_t> body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (body.size() != (nbits + 7) / 8) {
    throw std::runtime_error(path.string() + ": body holds " + std::to_string(body.size()) +
                             " bytes, header says " + std::to_string(nbits) + " bits");
  }
  k.bits = BitString::from_packed(body, nbits);
  return k;
}

}  // namespace fsqkd::cli
