#include "fsqkd/wire.hpp"

#include <bit>
#include <cstring>

namespace fsqkd {
namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v >> 8));
    u8(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) u8(static_cast<std::uint8_t>(v >> s));
  }
  void u64(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) u8(static_cast<std::uint8_t>(v >> s));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      u8(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    u8(static_cast<std::uint8_t>(v));
  }
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  std::uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  std::uint16_t u16() {
    std::uint16_t hi = u8();
    return static_cast<std::uint16_t>((hi << 8) | u8());
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | u8();
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      const std::uint8_t b = u8();
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if ((b & 0x80) == 0) return v;
    }
    throw WireError("varint too long");
  }
  std::uint32_t varint32() {
    const auto v = varint();
    if (v > 0xffffffffu) throw WireError("varint exceeds 32 bits");
    return static_cast<std::uint32_t>(v);
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  /// Upper bound for counts so a hostile length cannot trigger huge allocations.
  std::size_t remaining() const { return b_.size() - pos_; }
  void finish() const {
    if (pos_ != b_.size()) throw WireError("trailing bytes in payload");
  }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw WireError("truncated payload");
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

void expect_kind(const Message& m, MessageKind k) {
  if (m.kind != k) {
    throw WireError("expected " + std::string(to_string(k)) + ", got " + std::string(to_string(m.kind)));
  }
}

void write_bitmap(Writer& w, const std::vector<bool>& bits) {
  w.varint(bits.size());
  std::uint8_t acc = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) acc |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    if (i % 8 == 7) {
      w.u8(acc);
      acc = 0;
    }
  }
  if (bits.size() % 8 != 0) w.u8(acc);
}

std::vector<bool> read_bitmap(Reader& r) {
  const auto n = r.varint();
  if ((n + 7) / 8 > r.remaining()) throw WireError("bitmap longer than payload");
  auto bytes = r.bytes(static_cast<std::size_t>((n + 7) / 8));
  std::vector<bool> out(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  return out;
}

Message encode_slots(MessageKind kind, const SlotList& p) {
  Writer w;
  w.varint(p.slots.size());
  std::uint32_t prev = 0;
  for (std::size_t i = 0; i < p.slots.size(); ++i) {
    const std::uint32_t s = p.slots[i];
    if (i > 0 && s <= prev) throw WireError("slot list not strictly increasing");
    w.varint(i == 0 ? s : s - prev);
    prev = s;
  }
  return {kind, w.take()};
}

}  // namespace

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::DetectedSlots: return "DETECTED_SLOTS";
    case MessageKind::Bases: return "BASES";
    case MessageKind::MatchedSlots: return "MATCHED_SLOTS";
    case MessageKind::ParityRequest: return "PARITY_REQUEST";
    case MessageKind::ParityReply: return "PARITY_REPLY";
    case MessageKind::ShuffleSeed: return "SHUFFLE_SEED";
    case MessageKind::RoundDone: return "ROUND_DONE";
    case MessageKind::PaSpec: return "PA_SPEC";
    case MessageKind::KeyCheck: return "KEYCHECK";
    case MessageKind::Abort: return "ABORT";
  }
  return "UNKNOWN";
}

std::vector<std::uint8_t> encode_frame(const Frame& f) {
  if (f.payload.size() > kMaxPayloadSize) throw WireError("payload too large");
  Writer w;
  w.u32(static_cast<std::uint32_t>(f.payload.size()));
  w.u8(static_cast<std::uint8_t>(f.kind));
  w.u16(f.version);
  w.u64(f.session_id);
  w.u32(f.seq);
  w.bytes(f.payload);
  return w.take();
}

std::uint32_t frame_payload_length(std::span<const std::uint8_t, kFrameHeaderSize> header) {
  Reader r(header);
  const auto len = r.u32();
  if (len > kMaxPayloadSize) throw WireError("frame payload length exceeds limit");
  const auto kind = r.u8();
  if (kind < 1 || kind > 10) throw WireError("unknown message kind " + std::to_string(kind));
  return len;
}

std::optional<Frame> decode_frame(std::span<const std::uint8_t> bytes, std::size_t* consumed) {
  if (bytes.size() < kFrameHeaderSize) return std::nullopt;
  const auto len = frame_payload_length(bytes.first<kFrameHeaderSize>());
  if (bytes.size() < kFrameHeaderSize + len) return std::nullopt;
  Reader r(bytes.first(kFrameHeaderSize + len));
  Frame f;
  r.u32();
  f.kind = static_cast<MessageKind>(r.u8());
  f.version = r.u16();
  f.session_id = r.u64();
  f.seq = r.u32();
  auto p = r.bytes(len);
  f.payload.assign(p.begin(), p.end());
  if (consumed) *consumed = kFrameHeaderSize + len;
  return f;
}

Message encode_detected_slots(const SlotList& p) { return encode_slots(MessageKind::DetectedSlots, p); }
Message encode_matched_slots(const SlotList& p) { return encode_slots(MessageKind::MatchedSlots, p); }

SlotList decode_slot_list(const Message& m) {
  if (m.kind != MessageKind::DetectedSlots && m.kind != MessageKind::MatchedSlots) {
    throw WireError("expected a slot list, got " + std::string(to_string(m.kind)));
  }
  Reader r(m.payload);
  const auto n = r.varint();
  if (n > r.remaining()) throw WireError("slot count exceeds payload");
  SlotList out;
  out.slots.reserve(static_cast<std::size_t>(n));
  std::uint64_t cur = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto d = r.varint();
    if (i > 0 && d == 0) throw WireError("slot list not strictly increasing");
    cur = (i == 0) ? d : cur + d;
    if (cur > 0xffffffffu) throw WireError("slot index overflow");
    out.slots.push_back(static_cast<std::uint32_t>(cur));
  }
  r.finish();
  return out;
}

Message encode(const BasesPayload& p) {
  Writer w;
  std::vector<bool> bits(p.bases.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = p.bases[i] == Basis::Diagonal;
  write_bitmap(w, bits);
  return {MessageKind::Bases, w.take()};
}

BasesPayload decode_bases(const Message& m) {
  expect_kind(m, MessageKind::Bases);
  Reader r(m.payload);
  auto bits = read_bitmap(r);
  r.finish();
  BasesPayload out;
  out.bases.reserve(bits.size());
  for (bool b : bits) out.bases.push_back(b ? Basis::Diagonal : Basis::Rectilinear);
  return out;
}

Message encode(const ParityRequest& p) {
  Writer w;
  w.u32(p.round);
  w.varint(p.blocks.size());
  for (const auto& b : p.blocks) {
    w.varint(b.start);
    w.varint(b.end);
  }
  return {MessageKind::ParityRequest, w.take()};
}

ParityRequest decode_parity_request(const Message& m) {
  expect_kind(m, MessageKind::ParityRequest);
  Reader r(m.payload);
  ParityRequest out;
  out.round = r.u32();
  const auto n = r.varint();
  if (n > r.remaining()) throw WireError("block count exceeds payload");
  for (std::uint64_t i = 0; i < n; ++i) {
    BlockRange b{r.varint32(), r.varint32()};
    if (b.end <= b.start) throw WireError("empty block range");
    out.blocks.push_back(b);
  }
  r.finish();
  return out;
}

Message encode(const ParityReply& p) {
  Writer w;
  w.u32(p.round);
  w.varint(p.items.size());
  for (const auto& it : p.items) {
    w.varint(it.start);
    w.varint(it.end);
    w.u8(it.parity ? 1 : 0);
  }
  return {MessageKind::ParityReply, w.take()};
}

ParityReply decode_parity_reply(const Message& m) {
  expect_kind(m, MessageKind::ParityReply);
  Reader r(m.payload);
  ParityReply out;
  out.round = r.u32();
  const auto n = r.varint();
  if (n > r.remaining()) throw WireError("item count exceeds payload");
  for (std::uint64_t i = 0; i < n; ++i) {
    ParityItem it;
    it.start = r.varint32();
    it.end = r.varint32();
    const auto p = r.u8();
    if (p > 1) throw WireError("parity byte not 0 or 1");
    if (it.end <= it.start) throw WireError("empty block range");
    it.parity = p != 0;
    out.items.push_back(it);
  }
  r.finish();
  return out;
}

Message encode(const ShuffleSeed& p) {
  Writer w;
  w.u32(p.round);
  w.u64(p.seed);
  w.u32(p.word_length);
  return {MessageKind::ShuffleSeed, w.take()};
}

ShuffleSeed decode_shuffle_seed(const Message& m) {
  expect_kind(m, MessageKind::ShuffleSeed);
  Reader r(m.payload);
  ShuffleSeed out;
  out.round = r.u32();
  out.seed = r.u64();
  out.word_length = r.u32();
  r.finish();
  return out;
}

Message encode(const RoundDone& p) {
  Writer w;
  w.u32(p.round);
  w.u32(p.mismatches);
  w.u32(p.corrected_total);
  w.u8(p.finished ? 1 : 0);
  return {MessageKind::RoundDone, w.take()};
}

RoundDone decode_round_done(const Message& m) {
  expect_kind(m, MessageKind::RoundDone);
  Reader r(m.payload);
  RoundDone out;
  out.round = r.u32();
  out.mismatches = r.u32();
  out.corrected_total = r.u32();
  const auto f = r.u8();
  if (f > 1) throw WireError("bad finished flag");
  out.finished = f != 0;
  r.finish();
  return out;
}

Message encode(const PaSpec& p) {
  Writer w;
  w.u32(p.f_secret);
  w.u64(p.pa_seed[0]);
  w.u64(p.pa_seed[1]);
  w.u32(p.echo.n);
  w.u32(p.echo.ec_leak_bits);
  w.u32(p.echo.corrected);
  w.f64(p.echo.multi_photon_bits);
  w.f64(p.echo.breidbart_bits);
  w.f64(p.echo.bias_bits);
  w.f64(p.echo.safety_bits);
  return {MessageKind::PaSpec, w.take()};
}

PaSpec decode_pa_spec(const Message& m) {
  expect_kind(m, MessageKind::PaSpec);
  Reader r(m.payload);
  PaSpec out;
  out.f_secret = r.u32();
  out.pa_seed[0] = r.u64();
  out.pa_seed[1] = r.u64();
  out.echo.n = r.u32();
  out.echo.ec_leak_bits = r.u32();
  out.echo.corrected = r.u32();
  out.echo.multi_photon_bits = r.f64();
  out.echo.breidbart_bits = r.f64();
  out.echo.bias_bits = r.f64();
  out.echo.safety_bits = r.f64();
  r.finish();
  return out;
}

Message encode(const KeyCheckPayload& p) {
  Writer w;
  std::vector<bool> bits(p.bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = p.bits[i];
  write_bitmap(w, bits);
  return {MessageKind::KeyCheck, w.take()};
}

KeyCheckPayload decode_key_check(const Message& m) {
  expect_kind(m, MessageKind::KeyCheck);
  Reader r(m.payload);
  auto bits = read_bitmap(r);
  r.finish();
  KeyCheckPayload out;
  out.bits.reserve(bits.size());
  for (bool b : bits) out.bits.push_back(b);
  return out;
}

Message encode(const AbortPayload& p) {
  Writer w;
  w.varint(p.reason.size());
  w.bytes({reinterpret_cast<const std::uint8_t*>(p.reason.data()), p.reason.size()});
  return {MessageKind::Abort, w.take()};
}

AbortPayload decode_abort(const Message& m) {
  expect_kind(m, MessageKind::Abort);
  Reader r(m.payload);
  const auto n = r.varint();
  if (n > r.remaining()) throw WireError("abort reason exceeds payload");
  auto b = r.bytes(static_cast<std::size_t>(n));
  r.finish();
  return {std::string(b.begin(), b.end())};
}

}  // namespace fsqkd
