#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fsqkd/link_model.hpp"

namespace fsqkd {

enum class Basis : std::uint8_t { Rectilinear = 0, Diagonal = 1 };

/// Bob's four single-photon detectors. Bit value 0 is H / +45, 1 is V / -45.
enum class Detector : std::uint8_t { H = 0, V = 1, P45 = 2, M45 = 3 };

inline constexpr Basis detector_basis(Detector d) {
  return static_cast<std::uint8_t>(d) < 2 ? Basis::Rectilinear : Basis::Diagonal;
}
inline constexpr bool detector_bit(Detector d) { return (static_cast<std::uint8_t>(d) & 1u) != 0; }
inline constexpr Detector detector_for(Basis b, bool bit) {
  return static_cast<Detector>(static_cast<std::uint8_t>(b) * 2 + (bit ? 1 : 0));
}

/// One of Alice's pulses.
struct PulseRecord {
  std::uint32_t slot = 0;
  bool bit = false;
  Basis basis = Basis::Rectilinear;

  friend bool operator==(const PulseRecord&, const PulseRecord&) = default;
};

/// A timing slot in which at least one of Bob's detectors fired. For
/// multi-detections `detector` is the lowest-numbered detector that fired;
/// such records never contribute key bits.
struct DetectionRecord {
  std::uint32_t slot = 0;
  Detector detector = Detector::H;
  bool multi = false;

  friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

/// One 1-s quantum transmission: Alice's raw record and Bob's raw record.
struct TransmissionOutcome {
  LinkParams link;
  std::uint64_t seed = 0;
  std::vector<PulseRecord> pulses;         ///< one per slot, slot == index
  std::vector<DetectionRecord> detections; ///< sorted by slot

  std::size_t single_detections() const;
  std::size_t multi_detections() const;
};

/// Number of timing slots in one 1-s transmission.
std::uint32_t slots_per_transmission(const TransmitterParams& tx);

/// Per-detector, per-slot probability of a background or dark firing. A
/// calibration value C (sifted errors per detector per second) implies
/// 4C raw firings per detector per second.
double background_fire_probability(const LinkParams& lp);

/// Monte Carlo of one transmission, deterministic in (lp, seed).
TransmissionOutcome simulate_transmission(const LinkParams& lp, std::uint64_t seed);

struct BackgroundCalibration {
  std::array<std::size_t, 4> detections{};     ///< single detections per detector
  std::array<std::size_t, 4> sifted_errors{};  ///< sifted errors per detector
  double c_estimate = 0.0;                     ///< mean of sifted_errors
};

/// Estimates C from a mu = 0 transmission by sifting against Alice's record.
/// Throws std::logic_error when the outcome was generated with mu != 0.
BackgroundCalibration empirical_background_c(const TransmissionOutcome& outcome);

/// Outcome dump: structured-text header (parameters, seed, record counts)
/// terminated by a blank line, then big-endian records of
/// (slot: uint32, flags: uint8). Pulse flags: bit0 = value, bit1 = diagonal.
/// Detection flags: bits0-1 = detector, bit2 = multi.
void write_outcome(std::ostream& out, const TransmissionOutcome& outcome);
TransmissionOutcome read_outcome(std::istream& in);

}  // namespace fsqkd
