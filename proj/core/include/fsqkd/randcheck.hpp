#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "fsqkd/bit_string.hpp"
#include "fsqkd/kv_text.hpp"

namespace fsqkd {

struct FipsResult {
  struct {
    long ones = 0;
    bool pass = false;
  } monobit;
  struct {
    double statistic = 0;
    bool pass = false;
  } poker;
  struct {
    std::array<long, 6> zeros{};  ///< index 0 = length 1, index 5 = length >= 6
    std::array<long, 6> ones{};
    std::array<bool, 6> zeros_pass{};
    std::array<bool, 6> ones_pass{};
    bool pass = false;
  } runs;
  struct {
    long max_run = 0;
    bool pass = false;
  } long_run;
  bool pass = false;
};

/// FIPS 140-2 single-sample tests; throws std::domain_error unless the
/// input is exactly 20,000 bits.
FipsResult fips_140_2(const BitString& bits);

struct MaurerResult {
  unsigned L = 0;
  std::size_t Q = 0;
  std::size_t K = 0;
  double statistic = 0;
  double expected = 0;
  double variance = 0;
  double sigma = 0;
  double lower = 0;
  double upper = 0;
  bool pass = false;
};

/// Reference mean and variance of the statistic for L = 1..16.
double maurer_expected(unsigned L);
double maurer_variance(unsigned L);

inline constexpr double kMaurerY = 3.30;  // two-sided 0.001

/// Maurer's universal test. Q = 0 selects 10 * 2^L, K = 0 uses every block
/// after the initialization segment. Blocks are read MSB first.
MaurerResult maurer_universal(const BitString& bits, unsigned L = 5, std::size_t Q = 0, std::size_t K = 0,
                              double y = kMaurerY);

KvSection to_section(const FipsResult& r, std::string_view name);
KvSection to_section(const MaurerResult& r, std::string_view name);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace fsqkd
