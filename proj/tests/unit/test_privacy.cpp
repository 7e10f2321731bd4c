#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "fsqkd/link_model.hpp"
#include "fsqkd/privacy.hpp"
#include "oracles.hpp"

using namespace fsqkd;

namespace {

double log2_15() { return std::log(1.5) / std::log(2.0); }

}  // namespace

TEST(CollisionEntropy, Examples) {
  EXPECT_NEAR(collision_entropy_rate(0.29, 0.032), 0.635, 0.0005);
  EXPECT_NEAR(collision_entropy_rate(0.29, 0.032), 1 - 0.29 - 4 * 0.032 * log2_15(), 1e-12);
  EXPECT_DOUBLE_EQ(collision_entropy_rate(0.0, 0.0), 1.0);
  EXPECT_NEAR(collision_entropy_rate(0.5, 0.05), 0.383, 0.0005);
  EXPECT_LT(collision_entropy_rate(0.9, 0.5), 0.0);
}

TEST(Bias, Deduction) {
  EXPECT_EQ(bias_deduction(651, {0.5, 0.5}), 0.0);
  const double b = bias_deduction(651, {0.47, 0.53});
  EXPECT_GE(b, 2.0);
  EXPECT_LE(b, 4.0);
  EXPECT_NEAR(b, 651 * (1 + std::log2(0.47 * 0.47 + 0.53 * 0.53)), 1e-9);
  EXPECT_GT(bias_deduction(100, {0.6, 0.4}), 0.0);
}

TEST(Bias, Measure) {
  const auto b = measure_bias(BitString::from_text("0001"));
  EXPECT_DOUBLE_EQ(b.p0, 0.75);
  EXPECT_DOUBLE_EQ(b.p1, 0.25);
  const auto e = measure_bias(BitString{});
  EXPECT_DOUBLE_EQ(e.p0, 0.5);
}

TEST(SecretFraction, ReducedDaylightInputs) {
  const auto b = secret_fraction(651, 0.29, 0.032, {}, {0.47, 0.53}, 155.0);
  EXPECT_GE(b.f_secret, 225u);
  EXPECT_LE(b.f_secret, 275u);
  EXPECT_NEAR(b.multi_photon_bits, 651 * 0.29, 1e-9);
  EXPECT_NEAR(b.breidbart_bits, 651 * 4 * 0.032 * log2_15(), 1e-9);
  EXPECT_EQ(b.ec_leak_bits, 155.0);
  EXPECT_EQ(b.safety_bits, 20.0);
  const double expect = std::floor(651 - 651 * 0.29 - 651 * 4 * 0.032 * log2_15() -
                                   bias_deduction(651, {0.47, 0.53}) - 155 - 20);
  EXPECT_EQ(static_cast<double>(b.f_secret), expect);
}

TEST(SecretFraction, EmptyKey) {
  const auto b = secret_fraction(0, 0.3, 0.05, {});
  EXPECT_EQ(b.f_secret, 0u);
  EXPECT_EQ(b.deductions(), 0.0);
  EXPECT_EQ(b.audit().total(), 0u);
}

TEST(SecretFraction, ErrorFreeLimit) {
  const auto b = secret_fraction(10000, 0.1, 0.0, {});
  EXPECT_EQ(b.f_secret, 8980u);
}

TEST(SecretFraction, EstimatedLeakUsesOverhead) {
  const auto b = secret_fraction(10000, 0.1, 0.03, {});
  EXPECT_NEAR(b.ec_leak_bits, 1.19 * oracle::entropy(0.03) * 10000, 1e-6);
}

TEST(SecretFraction, FlooredAtZero) {
  EXPECT_EQ(secret_fraction(1000, 0.9, 0.2, {}).f_secret, 0u);
}

TEST(SecretFraction, MonotoneInEpsAndMu) {
  std::uint64_t prev = ~0ull;
  for (double eps = 0.0; eps <= 0.2; eps += 0.005) {
    const auto f = secret_fraction(10000, 0.3, eps, {}).f_secret;
    EXPECT_LE(f, prev);
    prev = f;
  }
  prev = ~0ull;
  for (double mu = 0.05; mu < 1.0; mu += 0.05) {
    const auto f = secret_fraction(10000, mu, 0.03, {}).f_secret;
    EXPECT_LE(f, prev);
    prev = f;
  }
}

TEST(Audit, ItemsPlusSecretEqualsN) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t n = g() % 20000;
    const double mu = 0.01 + 0.9 * u(g);
    const double eps = 0.15 * u(g);
    const BitBias bias{0.4 + 0.2 * u(g), 0};
    const auto b = secret_fraction(n, mu, eps, {}, {bias.p0, 1 - bias.p0},
                                   (i % 2) ? std::optional<double>(std::floor(u(g) * n)) : std::nullopt);
    const auto a = b.audit();
    EXPECT_EQ(a.n, n);
    EXPECT_EQ(a.f_secret, b.f_secret);
    EXPECT_EQ(a.total() + a.f_secret, n);
    // each item within one bit of its share of n - F
    if (b.f_secret > 0) {
      const double items[] = {b.multi_photon_bits, b.breidbart_bits, b.bias_bits, b.ec_leak_bits, b.safety_bits};
      const double scale = static_cast<double>(n - b.f_secret) / b.deductions();
      EXPECT_GE(scale, 1.0);
      EXPECT_LT((scale - 1.0) * b.deductions(), 1.0);
      for (int k = 0; k < 5; ++k) EXPECT_LT(std::abs(static_cast<double>(a.items[k]) - items[k] * scale), 1.0);
    }
  }
}

TEST(Policy, Validation) {
  SecrecyPolicy p;
  EXPECT_NO_THROW(p.validate());
  p.ec_overhead = 0.9;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.safety_s = -1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Subsets, HandComputedParities) {
  const auto key = BitString::from_text("1011");
  // S0 = {0, 2}, S1 = {1, 2, 3}
  const std::vector<SubsetMask> subsets = {{0b0101}, {0b1110}};
  EXPECT_EQ(subset_parities(key, subsets).to_text(), "00");
  EXPECT_EQ(subset_parities(key, {{0b0001}, {0b1000}, {0b0011}}).to_text(), "111");
}

TEST(Subsets, DeterministicMaskedAndHalfDense) {
  const auto s = derive_subsets(1000, 500, {7, 9});
  EXPECT_EQ(s, derive_subsets(1000, 500, {7, 9}));
  EXPECT_NE(s, derive_subsets(1000, 500, {7, 10}));
  ASSERT_EQ(s.size(), 500u);
  double members = 0;
  for (const auto& m : s) {
    ASSERT_EQ(m.size(), 16u);
    EXPECT_EQ(m.back() >> (1000 % 64), 0u);  // nothing past bit n-1
    for (auto w : m) members += std::popcount(w);
  }
  const double total = 500.0 * 1000.0;
  EXPECT_NEAR(members / total, 0.5, 3 * std::sqrt(0.25 / total));
}

TEST(Extract, MatchesSubsetDefinition) {
  const BitString key(oracle::random_bits(700, 3));
  const std::array<std::uint64_t, 2> seed = {11, 12};
  EXPECT_EQ(extract(key, 300, seed), subset_parities(key, derive_subsets(700, 300, seed)));
  EXPECT_EQ(extract(key, 300, seed).size(), 300u);
  EXPECT_TRUE(extract(key, 0, seed).empty());
}

TEST(Extract, OneDifferingBitScramblesHalfTheOutput) {
  const BitString a(oracle::random_bits(2000, 4));
  for (std::size_t at : {0u, 999u, 1999u}) {
    BitString b = a;
    b.flip(at);
    const auto ka = extract(a, 1000, {5, 6});
    const auto kb = extract(b, 1000, {5, 6});
    EXPECT_EQ(ka, extract(a, 1000, {5, 6}));
    EXPECT_NEAR(ka.hamming_distance(kb) / 1000.0, 0.5, 0.05) << at;
  }
}

TEST(KeyCheck, MatchingKeysLoseCheckBits) {
  const BitString k(oracle::random_bits(264, 1));
  Transcript t;
  const auto r = key_check(k, k, {}, &t);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.alice.size(), 248u);
  EXPECT_EQ(r.alice, k.slice(16, 248));
  EXPECT_EQ(r.bob, r.alice);
  ASSERT_EQ(t.frames().size(), 2u);
  EXPECT_EQ(scan_transcript(t).keycheck_bits, 32u);
}

TEST(KeyCheck, DifferenceInWindowDestroysKeys) {
  const BitString k(oracle::random_bits(264, 1));
  BitString b = k;
  b.flip(3);
  const auto r = key_check(k, b, {});
  EXPECT_FALSE(r.passed);
  EXPECT_TRUE(r.alice.empty());
  EXPECT_TRUE(r.bob.empty());
}

TEST(KeyCheck, DifferenceOutsideWindowIsNotSeen) {
  const BitString k(oracle::random_bits(264, 1));
  BitString b = k;
  b.flip(100);
  const auto r = key_check(k, b, {});
  EXPECT_TRUE(r.passed);
  EXPECT_NE(r.alice, r.bob);
}

TEST(KeyCheck, FalseAcceptRateAfterAmplification) {
  // Reconciled keys differ in one bit; every amplified bit differs with
  // probability 1/2, so a 4-bit window passes about 1/16 of the time.
  const BitString a(oracle::random_bits(500, 8));
  BitString b = a;
  b.flip(17);
  SecrecyPolicy p;
  p.keycheck_bits = 4;
  int passed = 0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    const std::array<std::uint64_t, 2> seed = {static_cast<std::uint64_t>(t), 99};
    if (key_check(extract(a, 64, seed), extract(b, 64, seed), p).passed) ++passed;
  }
  const double p0 = 1.0 / 16;
  EXPECT_NEAR(passed / double(trials), p0, 4 * std::sqrt(p0 * (1 - p0) / trials));
}
