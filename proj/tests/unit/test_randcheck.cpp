#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "fsqkd/fips_bounds.hpp"
#include "fsqkd/randcheck.hpp"
#include "oracles.hpp"

using namespace fsqkd;

namespace {

BitString uniform_bits(std::size_t n, std::uint64_t seed) { return BitString(oracle::random_bits(n, seed)); }

BitString alternating(std::size_t n) {
  BitString b(n);
  for (std::size_t i = 1; i < n; i += 2) b.set(i, true);
  return b;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Fnv, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
}

TEST(FipsBounds, TableFileMatchesConstants) {
  const auto file = read_file(std::string(FSQKD_DATA_DIR) + "/fips140_2_bounds.txt");
  ASSERT_FALSE(file.empty());
  EXPECT_EQ(file, fips::bounds_text());
  EXPECT_EQ(fnv1a64(file), 0x9d82b3ecdf7a2e01ull);
}

TEST(Fips, WrongLengthRejected) {
  EXPECT_THROW(fips_140_2(BitString(19999)), std::domain_error);
  EXPECT_THROW(fips_140_2(BitString(20001)), std::domain_error);
}

TEST(Fips, AlternatingFailsRuns) {
  const auto r = fips_140_2(alternating(20000));
  EXPECT_EQ(r.monobit.ones, 10000);
  EXPECT_TRUE(r.monobit.pass);
  EXPECT_EQ(r.runs.ones[0], 10000);
  EXPECT_EQ(r.runs.zeros[0], 10000);
  EXPECT_FALSE(r.runs.pass);
  EXPECT_TRUE(r.long_run.pass);
  EXPECT_FALSE(r.pass);
}

TEST(Fips, AllZerosFails) {
  const auto r = fips_140_2(BitString(20000));
  EXPECT_EQ(r.monobit.ones, 0);
  EXPECT_FALSE(r.monobit.pass);
  EXPECT_FALSE(r.poker.pass);
  EXPECT_FALSE(r.long_run.pass);
  EXPECT_EQ(r.long_run.max_run, 20000);
  EXPECT_FALSE(r.pass);
}

TEST(Fips, BiasedSourceFailsMonobit) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto r = fips_140_2(BitString(oracle::random_bits(20000, 900 + s, 0.6)));
    EXPECT_FALSE(r.monobit.pass);
    EXPECT_GT(r.monobit.ones, fips::kMonobitUpper);
  }
}

TEST(Fips, PokerStatisticByHand) {
  // every 4-bit pattern exactly 312 or 313 times gives a small statistic
  BitString b;
  for (int i = 0; i < 5000; ++i) {
    const int v = i % 16;
    for (int k = 3; k >= 0; --k) b.push_back((v >> k) & 1);
  }
  const auto r = fips_140_2(b);
  double sum = 0;
  for (int v = 0; v < 16; ++v) {
    const double f = 5000 / 16 + (v < 5000 % 16 ? 1 : 0);
    sum += f * f;
  }
  EXPECT_NEAR(r.poker.statistic, 16.0 / 5000 * sum - 5000, 1e-9);
  EXPECT_FALSE(r.poker.pass);  // too uniform
}

TEST(Fips, GoodGeneratorMostlyPasses) {
  int failures = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    if (!fips_140_2(uniform_bits(20000, 4000 + s)).pass) ++failures;
  }
  EXPECT_LE(failures, 2);
}

TEST(Fips, ReportSection) {
  const auto sec = to_section(fips_140_2(alternating(20000)), "chunk0");
  EXPECT_EQ(sec.name, "chunk0");
  EXPECT_EQ(sec.get("monobit"), "pass");
  EXPECT_EQ(sec.get("runs"), "fail");
  EXPECT_EQ(sec.get("overall"), "fail");
}

TEST(Maurer, ReferenceTable) {
  EXPECT_NEAR(maurer_expected(5), 4.2534266, 1e-7);
  EXPECT_NEAR(maurer_variance(5), 2.705, 1e-9);
  EXPECT_NEAR(maurer_expected(6), 5.2177052, 1e-7);
  EXPECT_THROW(maurer_expected(0), std::domain_error);
  EXPECT_THROW(maurer_expected(17), std::domain_error);
}

TEST(Maurer, PeriodicBlockFails) {
  BitString b;
  for (int i = 0; i < 20000; ++i) {
    for (int k : {1, 0, 1, 1, 0}) b.push_back(k);
  }
  const auto r = maurer_universal(b);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_FALSE(r.pass);
}

TEST(Maurer, InsufficientBits) {
  EXPECT_THROW(maurer_universal(BitString(320 * 5)), std::domain_error);
  EXPECT_THROW(maurer_universal(BitString(5000), 5, 320, 1000), std::domain_error);
}

TEST(Maurer, BlockOrderIsMsbFirst) {
  // Q = 2 blocks, K = 1: blocks 10000, 00001, 10000 -> distance 2 -> log2 2 = 1
  const auto b = BitString::from_text("10000 00001 10000");
  const auto r = maurer_universal(b, 5, 2, 1);
  EXPECT_DOUBLE_EQ(r.statistic, 1.0);
  const auto b2 = BitString::from_text("10000 00001 00001");
  EXPECT_DOUBLE_EQ(maurer_universal(b2, 5, 2, 1).statistic, 0.0);
}

TEST(Maurer, UniformSourceMatchesReferenceMean) {
  const std::size_t K = 5000u << 5;
  const std::size_t bits = (320 + K) * 5;
  double mean = 0;
  int passes = 0;
  const int seeds = 20;
  double sigma = 0;
  for (int s = 0; s < seeds; ++s) {
    const auto r = maurer_universal(uniform_bits(bits, 60 + s), 5, 0, K);
    mean += r.statistic;
    sigma = r.sigma;
    if (r.pass) ++passes;
  }
  mean /= seeds;
  EXPECT_NEAR(mean, 4.2534266, 4 * sigma / std::sqrt(double(seeds)));
  EXPECT_GT(std::abs(mean - 2.5769), 1.0);
  EXPECT_GE(passes, seeds - 1);
}

TEST(Maurer, ConvergesAsKGrows) {
  std::vector<double> err;
  for (std::size_t k : {std::size_t{1} << 8, std::size_t{1} << 10, std::size_t{1} << 12}) {
    const std::size_t K = k << 5;
    double mean = 0;
    const int seeds = 12;
    for (int s = 0; s < seeds; ++s) mean += maurer_universal(uniform_bits((320 + K) * 5, 700 + s), 5, 0, K).statistic;
    err.push_back(std::abs(mean / seeds - maurer_expected(5)));
  }
  EXPECT_LT(err[2], err[0]);
  EXPECT_LT(err[2], 0.01);
}

TEST(Maurer, ReportSection) {
  const auto sec = to_section(maurer_universal(uniform_bits(200000, 1)), "maurer");
  EXPECT_EQ(sec.get("L"), "5");
  EXPECT_EQ(sec.get("Q"), "320");
  EXPECT_EQ(sec.get("K"), std::to_string(40000 - 320));
}
