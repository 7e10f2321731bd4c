#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fsqkd/bit_string.hpp"
#include "fsqkd/endpoint.hpp"
#include "fsqkd/quantum_sim.hpp"

namespace fsqkd {

struct SiftedKey {
  BitString bits;
  std::vector<std::uint32_t> slots;  ///< strictly increasing
  Side side = Side::Alice;
  std::size_t rectilinear = 0;       ///< bits sifted in the rectilinear basis

  std::size_t n() const { return bits.size(); }
};

/// Alice's half of basis reconciliation: answers DETECTED_SLOTS with BASES,
/// then keeps her bits for the slots in MATCHED_SLOTS.
class SiftAlice final : public Phase {
 public:
  explicit SiftAlice(const std::vector<PulseRecord>& pulses) : pulses_(pulses) {}

  std::vector<Message> start() override { return {}; }
  std::vector<Message> on_message(const Message& m) override;
  bool done() const override { return key_.has_value(); }

  const SiftedKey& key() const { return *key_; }
  /// Bob's single-detection count, learned from DETECTED_SLOTS.
  std::size_t raw_count() const { return detected_.size(); }

 private:
  const std::vector<PulseRecord>& pulses_;
  std::vector<std::uint32_t> detected_;
  bool bases_sent_ = false;
  std::optional<SiftedKey> key_;
};

/// Bob's half: announces his single-detection slots, keeps the ones where
/// Alice's basis matches his measurement basis.
class SiftBob final : public Phase {
 public:
  explicit SiftBob(const std::vector<DetectionRecord>& detections);

  std::vector<Message> start() override;
  std::vector<Message> on_message(const Message& m) override;
  bool done() const override { return key_.has_value(); }

  const SiftedKey& key() const { return *key_; }
  std::size_t raw_count() const { return singles_.size(); }

 private:
  std::vector<DetectionRecord> singles_;
  std::optional<SiftedKey> key_;
};

/// Runs both sift phases over an in-process channel. Returns (Alice, Bob).
std::pair<SiftedKey, SiftedKey> run_sift(const std::vector<PulseRecord>& pulses,
                                         const std::vector<DetectionRecord>& detections,
                                         std::uint64_t session_id = 1,
                                         Transcript* transcript = nullptr);

}  // namespace fsqkd
