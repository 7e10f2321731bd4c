#pragma once

#include <array>
#include <cstddef>
#include <string>

namespace fsqkd::fips {

// Single-sample acceptance bounds of the FIPS PUB 140-2 statistical random
// number generator tests.
// core/data/fips140_2_bounds.txt is the canonical rendering of this table.

inline constexpr std::size_t kSampleBits = 20000;

// Monobit: number of ones X must satisfy lower < X < upper.
inline constexpr long kMonobitLower = 9725;
inline constexpr long kMonobitUpper = 10275;

// Poker over 5000 4-bit segments: lower < X < upper.
inline constexpr double kPokerLower = 2.16;
inline constexpr double kPokerUpper = 46.17;

struct RunInterval {
  int length;  // 6 means "6 or longer"
  long lower;  // inclusive
  long upper;  // inclusive
};

// Same interval for runs of zeros and runs of ones.
inline constexpr std::array<RunInterval, 6> kRuns = {{
    {1, 2315, 2685},
    {2, 1114, 1386},
    {3, 527, 723},
    {4, 240, 384},
    {5, 103, 209},
    {6, 103, 209},
}};

// A run of this length or longer fails the long run test.
inline constexpr long kLongRun = 26;

std::string bounds_text();

}  // namespace fsqkd::fips
