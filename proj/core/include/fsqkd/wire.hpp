#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fsqkd/bit_string.hpp"
#include "fsqkd/quantum_sim.hpp"

namespace fsqkd {

/// Public-channel message kinds. Numeric values are the on-wire kind byte.
enum class MessageKind : std::uint8_t {
  DetectedSlots = 1,
  Bases = 2,
  MatchedSlots = 3,
  ParityRequest = 4,
  ParityReply = 5,
  ShuffleSeed = 6,
  RoundDone = 7,
  PaSpec = 8,
  KeyCheck = 9,
  Abort = 10,
};

std::string_view to_string(MessageKind kind);

inline constexpr std::uint16_t kWireVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 4 + 1 + 2 + 8 + 4;
inline constexpr std::uint32_t kMaxPayloadSize = 64u << 20;

class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unframed message as produced by protocol phases.
struct Message {
  MessageKind kind{};
  std::vector<std::uint8_t> payload;
};

/// Frame layout (big-endian): payload length u32, kind u8, version u16,
/// session id u64, sequence number u32, payload.
struct Frame {
  MessageKind kind{};
  std::uint16_t version = kWireVersion;
  std::uint64_t session_id = 0;
  std::uint32_t seq = 0;
  std::vector<std::uint8_t> payload;

  Message message() const { return {kind, payload}; }
  friend bool operator==(const Frame&, const Frame&) = default;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);

/// Decodes one frame from the front of `bytes`. Returns std::nullopt when
/// more bytes are needed; throws WireError on a malformed header.
std::optional<Frame> decode_frame(std::span<const std::uint8_t> bytes, std::size_t* consumed);

/// Parses the fixed header and returns the payload length it announces.
std::uint32_t frame_payload_length(std::span<const std::uint8_t, kFrameHeaderSize> header);

// ---------------------------------------------------------------------------
// Payloads. Every decode_* checks the kind and rejects trailing bytes.

struct SlotList {
  std::vector<std::uint32_t> slots;  ///< strictly increasing
};

struct BasesPayload {
  std::vector<Basis> bases;
};

struct BlockRange {
  std::uint32_t start = 0;
  std::uint32_t end = 0;  ///< exclusive
  friend bool operator==(const BlockRange&, const BlockRange&) = default;
};

struct ParityRequest {
  std::uint32_t round = 0;
  std::vector<BlockRange> blocks;
};

struct ParityItem {
  std::uint32_t start = 0;
  std::uint32_t end = 0;
  bool parity = false;
};

struct ParityReply {
  std::uint32_t round = 0;
  std::vector<ParityItem> items;
};

struct ShuffleSeed {
  std::uint32_t round = 0;
  std::uint64_t seed = 0;
  std::uint32_t word_length = 0;
};

struct RoundDone {
  std::uint32_t round = 0;
  std::uint32_t mismatches = 0;       ///< top-level word mismatches in this round
  std::uint32_t corrected_total = 0;  ///< bits corrected since reconciliation began
  bool finished = false;
};

/// Budget fields Alice echoes so Bob can cross-check his own view.
struct BudgetEcho {
  std::uint32_t n = 0;
  std::uint32_t ec_leak_bits = 0;
  std::uint32_t corrected = 0;
  double multi_photon_bits = 0;
  double breidbart_bits = 0;
  double bias_bits = 0;
  double safety_bits = 0;
};

struct PaSpec {
  std::uint32_t f_secret = 0;
  std::array<std::uint64_t, 2> pa_seed{};
  BudgetEcho echo;
};

struct KeyCheckPayload {
  BitString bits;
};

struct AbortPayload {
  std::string reason;
};

Message encode_detected_slots(const SlotList& p);
Message encode_matched_slots(const SlotList& p);
Message encode(const BasesPayload& p);
Message encode(const ParityRequest& p);
Message encode(const ParityReply& p);
Message encode(const ShuffleSeed& p);
Message encode(const RoundDone& p);
Message encode(const PaSpec& p);
Message encode(const KeyCheckPayload& p);
Message encode(const AbortPayload& p);

SlotList decode_slot_list(const Message& m);  // DetectedSlots or MatchedSlots
BasesPayload decode_bases(const Message& m);
ParityRequest decode_parity_request(const Message& m);
ParityReply decode_parity_reply(const Message& m);
ShuffleSeed decode_shuffle_seed(const Message& m);
RoundDone decode_round_done(const Message& m);
PaSpec decode_pa_spec(const Message& m);
KeyCheckPayload decode_key_check(const Message& m);
AbortPayload decode_abort(const Message& m);

}  // namespace fsqkd
