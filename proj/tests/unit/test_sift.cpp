#include <gtest/gtest.h>

#include <cmath>

#include "fsqkd/quantum_sim.hpp"
#include "fsqkd/sift.hpp"

using namespace fsqkd;

namespace {

constexpr Basis R = Basis::Rectilinear;
constexpr Basis D = Basis::Diagonal;

std::vector<PulseRecord> pulses_from(const std::vector<std::pair<bool, Basis>>& v) {
  std::vector<PulseRecord> out;
  for (std::uint32_t i = 0; i < v.size(); ++i) out.push_back({i, v[i].first, v[i].second});
  return out;
}

LinkParams reduced_day_link() {
  LinkParams lp;
  lp.tx.mu = 0.29;
  lp.ch.eta_trans = 1.0;
  lp.ch.eta_geo = 0.024;
  lp.ch.background_c = 5;
  return lp;
}

Frame frame(std::uint64_t sid, std::uint32_t seq, const Message& m) {
  return {m.kind, kWireVersion, sid, seq, m.payload};
}

}  // namespace

TEST(Sift, HandBuiltEightSlots) {
  // Alice: bits and bases per slot.
  const auto pulses = pulses_from({{0, R}, {1, D}, {1, R}, {0, D}, {1, R}, {0, R}, {1, D}, {0, D}});
  // Bob measures every slot; bases match at slots 0, 3, 4, 6.
  // Slot 4 carries an error (V expected, H seen) and slot 5 is a multi-detection.
  const std::vector<DetectionRecord> det = {
      {0, Detector::H, false},   {1, Detector::V, false},   {2, Detector::P45, false},
      {3, Detector::P45, false}, {4, Detector::H, false},   {5, Detector::H, true},
      {6, Detector::M45, false}, {7, Detector::V, false},
  };
  const auto [a, b] = run_sift(pulses, det);
  const std::vector<std::uint32_t> want = {0, 3, 4, 6};
  EXPECT_EQ(a.slots, want);
  EXPECT_EQ(b.slots, want);
  EXPECT_EQ(a.n(), 4u);
  EXPECT_EQ(a.bits.to_text(), "0011");
  EXPECT_EQ(b.bits.to_text(), "0001");
  EXPECT_EQ(a.rectilinear, 2u);
  EXPECT_EQ(b.rectilinear, 2u);
  EXPECT_EQ(a.side, Side::Alice);
  EXPECT_EQ(b.side, Side::Bob);
}

TEST(Sift, ZeroDetectionsGiveEmptyKeys) {
  const auto pulses = pulses_from({{0, R}, {1, D}});
  const auto [a, b] = run_sift(pulses, {});
  EXPECT_EQ(a.n(), 0u);
  EXPECT_EQ(b.n(), 0u);
}

TEST(Sift, SlotListsAgreeOnSimulatedTransmissions) {
  double n = 0, rect = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto o = simulate_transmission(reduced_day_link(), seed);
    const auto [a, b] = run_sift(o.pulses, o.detections);
    ASSERT_EQ(a.slots, b.slots);
    ASSERT_EQ(a.n(), b.n());
    EXPECT_EQ(a.rectilinear, b.rectilinear);
    // only background can make the keys differ
    EXPECT_LT(a.bits.hamming_distance(b.bits), a.n() / 10);
    n += static_cast<double>(a.n());
    rect += static_cast<double>(a.rectilinear);
  }
  EXPECT_NEAR(n / 20, 651, 3 * std::sqrt(651.0));
  EXPECT_NEAR(rect / n, 0.5, 3 * std::sqrt(0.25 / n));
}

TEST(Sift, TranscriptNeverDependsOnKeyValues) {
  const auto o = simulate_transmission(reduced_day_link(), 11);
  Transcript t1, t2;
  run_sift(o.pulses, o.detections, 5, &t1);
  auto flipped = o.pulses;
  for (auto& p : flipped) p.bit = !p.bit;
  run_sift(flipped, o.detections, 5, &t2);
  ASSERT_EQ(t1.frames().size(), 3u);
  EXPECT_EQ(t1.frames(), t2.frames());
  EXPECT_EQ(t1.frames()[0].kind, MessageKind::DetectedSlots);
  EXPECT_EQ(t1.frames()[1].kind, MessageKind::Bases);
  EXPECT_EQ(t1.frames()[2].kind, MessageKind::MatchedSlots);
}

TEST(Sift, AliceAbortsOnUnexpectedMessage) {
  const auto pulses = pulses_from({{0, R}, {1, D}});
  SiftAlice alice(pulses);
  PhaseEndpoint a(7, alice);
  a.start();
  const auto reply = a.handle(frame(7, 1, encode_matched_slots({{0}})));
  ASSERT_EQ(reply.size(), 1u);
  EXPECT_EQ(reply[0].kind, MessageKind::Abort);
  EXPECT_EQ(a.state(), Endpoint::State::Aborted);
}

TEST(Sift, AliceAbortsOnUnannouncedMatch) {
  const auto pulses = pulses_from({{0, R}, {1, D}, {1, D}});
  SiftAlice alice(pulses);
  PhaseEndpoint a(7, alice);
  a.start();
  EXPECT_EQ(a.handle(frame(7, 1, encode_detected_slots({{0, 1}}))).at(0).kind, MessageKind::Bases);
  EXPECT_EQ(a.handle(frame(7, 3, encode_matched_slots({{2}}))).at(0).kind, MessageKind::Abort);
}

TEST(Sift, AliceRejectsSlotsOutsideTransmission) {
  const auto pulses = pulses_from({{0, R}});
  SiftAlice alice(pulses);
  PhaseEndpoint a(1, alice);
  EXPECT_EQ(a.handle(frame(1, 1, encode_detected_slots({{5}}))).at(0).kind, MessageKind::Abort);
}

TEST(Sift, EndpointRejectsSequenceAndSessionErrors) {
  const auto pulses = pulses_from({{0, R}});
  SiftAlice alice1(pulses), alice2(pulses);
  PhaseEndpoint a(1, alice1), b(1, alice2);
  EXPECT_EQ(a.handle(frame(1, 2, encode_detected_slots({{0}}))).at(0).kind, MessageKind::Abort);
  EXPECT_NE(a.abort_reason().find("out-of-order"), std::string::npos);
  EXPECT_EQ(b.handle(frame(2, 1, encode_detected_slots({{0}}))).at(0).kind, MessageKind::Abort);
  EXPECT_NE(b.abort_reason().find("session id"), std::string::npos);
}

TEST(Sift, BobRejectsShortBases) {
  SiftBob bob({{0, Detector::H, false}, {3, Detector::P45, false}});
  PhaseEndpoint b(1, bob);
  EXPECT_EQ(b.start().at(0).kind, MessageKind::DetectedSlots);
  EXPECT_EQ(b.handle(frame(1, 2, encode(BasesPayload{{R}}))).at(0).kind, MessageKind::Abort);
}

TEST(Sift, UnsortedDetectionsRejected) {
  EXPECT_THROW(SiftBob({{4, Detector::H, false}, {2, Detector::V, false}}), std::invalid_argument);
}
