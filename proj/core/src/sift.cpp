#include "fsqkd/sift.hpp"

#include <algorithm>

namespace fsqkd {

std::vector<Message> SiftAlice::on_message(const Message& m) {
  if (!bases_sent_) {
    if (m.kind != MessageKind::DetectedSlots) throw ProtocolError("expected DETECTED_SLOTS");
    detected_ = decode_slot_list(m).slots;
    if (!detected_.empty() && detected_.back() >= pulses_.size()) {
      throw ProtocolError("detected slot outside the transmission");
    }
    BasesPayload reply;
    reply.bases.reserve(detected_.size());
    for (auto slot : detected_) reply.bases.push_back(pulses_[slot].basis);
    bases_sent_ = true;
    return {encode(reply)};
  }
  if (key_) throw ProtocolError("sift already finished");
  if (m.kind != MessageKind::MatchedSlots) throw ProtocolError("expected MATCHED_SLOTS");
  const auto matched = decode_slot_list(m).slots;
  if (!std::includes(detected_.begin(), detected_.end(), matched.begin(), matched.end())) {
    throw ProtocolError("matched slot was never announced as detected");
  }
  SiftedKey key;
  key.side = Side::Alice;
  key.slots = matched;
  key.bits.reserve(matched.size());
  for (auto slot : matched) {
    key.bits.push_back(pulses_[slot].bit);
    if (pulses_[slot].basis == Basis::Rectilinear) ++key.rectilinear;
  }
  key_ = std::move(key);
  return {};
}

SiftBob::SiftBob(const std::vector<DetectionRecord>& detections) {
  for (const auto& d : detections) {
    if (d.multi) continue;
    if (!singles_.empty() && d.slot <= singles_.back().slot) {
      throw std::invalid_argument("detections must be sorted by slot");
    }
    singles_.push_back(d);
  }
}

std::vector<Message> SiftBob::start() {
  SlotList list;
  list.slots.reserve(singles_.size());
  for (const auto& d : singles_) list.slots.push_back(d.slot);
  return {encode_detected_slots(list)};
}

std::vector<Message> SiftBob::on_message(const Message& m) {
  if (key_) throw ProtocolError("sift already finished");
  if (m.kind != MessageKind::Bases) throw ProtocolError("expected BASES");
  const auto bases = decode_bases(m).bases;
  if (bases.size() != singles_.size()) throw ProtocolError("BASES length does not match detections");
  SiftedKey key;
  key.side = Side::Bob;
  SlotList matched;
  for (std::size_t i = 0; i < singles_.size(); ++i) {
    const auto& d = singles_[i];
    if (detector_basis(d.detector) != bases[i]) continue;
    matched.slots.push_back(d.slot);
    key.slots.push_back(d.slot);
    key.bits.push_back(detector_bit(d.detector));
    if (bases[i] == Basis::Rectilinear) ++key.rectilinear;
  }
  key_ = std::move(key);
  return {encode_matched_slots(matched)};
}

std::pair<SiftedKey, SiftedKey> run_sift(const std::vector<PulseRecord>& pulses,
                                         const std::vector<DetectionRecord>& detections,
                                         std::uint64_t session_id, Transcript* transcript) {
  SiftAlice alice(pulses);
  SiftBob bob(detections);
  PhaseEndpoint a(session_id, alice);
  PhaseEndpoint b(session_id, bob);
  drive_loopback(b, a, transcript);
  if (a.state() != Endpoint::State::Finished || b.state() != Endpoint::State::Finished) {
    throw ProtocolError("sift aborted: " + (a.abort_reason().empty() ? b.abort_reason() : a.abort_reason()));
  }
  return {alice.key(), bob.key()};
}

}  // namespace fsqkd
