#pragma once

#include <cstdint>
#include <random>

namespace fsqkd {

/// Seedable generator with platform-independent output.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. All conversions (uniform doubles, bounded integers, Poisson,
/// normal) are implemented here rather than with <random> distributions,
/// whose algorithms differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Seeds from 128 bits through std::seed_seq (fully specified by the standard).
  Rng(std::uint64_t seed_hi, std::uint64_t seed_lo);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  bool coin() { return (engine_() >> 63) != 0; }
  /// Uniform on [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Inversion sampling; intended for small means (< ~10).
  unsigned poisson(double mean);
  /// Box-Muller, one value per call.
  double normal(double mean, double sigma);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix64(std::uint64_t x);

/// Derives the seed of an independent stream from a base seed and a label.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(base ^ mix64(stream + 0x9e3779b97f4a7c15ull));
}

/// Well-known stream labels derived from a session seed.
namespace streams {
inline constexpr std::uint64_t kQuantumChannel = 1;
inline constexpr std::uint64_t kShuffle = 2;
inline constexpr std::uint64_t kPrivacyAmplification = 3;
inline constexpr std::uint64_t kSessionId = 4;
inline constexpr std::uint64_t kTurbulence = 5;
}  // namespace streams

}  // namespace fsqkd
