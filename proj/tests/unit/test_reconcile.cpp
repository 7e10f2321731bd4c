#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fsqkd/link_model.hpp"
#include "fsqkd/reconcile.hpp"
#include "oracles.hpp"

using namespace fsqkd;

namespace {

BitString noisy_copy(const BitString& a, double eps, std::uint64_t seed) {
  auto flips = oracle::random_bits(a.size(), seed, eps);
  BitString b = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (flips[i]) b.flip(i);
  }
  return b;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

TEST(WordLength, Examples) {
  EXPECT_EQ(initial_word_length(0.03), 24u);
  EXPECT_EQ(initial_word_length(0.5), 8u);
  EXPECT_EQ(initial_word_length(0.001), 730u);
  EXPECT_EQ(initial_word_length(0.001, 500), 500u);
  EXPECT_EQ(initial_word_length(0.03, 12), 12u);
  EXPECT_EQ(initial_word_length(0.0, 1000), 1000u);
  EXPECT_EQ(initial_word_length(0.03, 0), 0u);
  EXPECT_THROW(initial_word_length(0.6), std::domain_error);
  EXPECT_THROW(initial_word_length(-0.1), std::domain_error);
}

TEST(WordLength, DoublesUpToHalfKey) {
  EXPECT_EQ(next_word_length(24, 24, 10000), 48u);
  EXPECT_EQ(next_word_length(4096, 24, 10000), 5000u);
  EXPECT_EQ(next_word_length(5000, 24, 10000), 5000u);
  EXPECT_EQ(next_word_length(730, 730, 1000), 730u);
}

TEST(Shuffle, BijectionAndReproducible) {
  for (std::size_t n : {0u, 1u, 2u, 17u, 1000u}) {
    auto p = shuffle_permutation(n, 42);
    EXPECT_EQ(p, shuffle_permutation(n, 42));
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(sorted[i], i);
  }
  EXPECT_NE(shuffle_permutation(1000, 1), shuffle_permutation(1000, 2));
}

TEST(Correct, EmptyKey) {
  const auto [a, b] = correct(BitString{}, BitString{}, 0.03, 1);
  EXPECT_EQ(a.n(), 0u);
  EXPECT_EQ(a.leak_bits, 0u);
  EXPECT_EQ(b.leak_bits, 0u);
}

TEST(Correct, LengthMismatchRejected) {
  EXPECT_THROW(correct(BitString(10), BitString(11), 0.03, 1), std::invalid_argument);
}

TEST(Correct, IdenticalKeysStopAfterTwoRounds) {
  for (std::size_t n : {651u, 1000u, 10000u}) {
    const BitString key(oracle::random_bits(n, n));
    const auto [a, b] = correct(key, key, 0.03, 9);
    EXPECT_EQ(a.epsilon_measured, 0.0);
    EXPECT_EQ(a.rounds, 2u);
    EXPECT_EQ(b.rounds, 2u);
    const std::size_t words = ceil_div(n, 24) + ceil_div(n, 48);
    EXPECT_EQ(a.leak_bits, words) << n;
    EXPECT_EQ(b.leak_bits, words) << n;
    EXPECT_EQ(b.bits, key);
  }
}

TEST(Correct, SinglePlantedErrorFollowsBisection) {
  // eps estimate chosen so the first word length is 16: four words of 16.
  const double eps = 0.73 / 16;
  ASSERT_EQ(initial_word_length(eps, 64), 16u);
  const BitString alice(oracle::random_bits(64, 3));
  for (std::size_t at = 0; at < 64; ++at) {
    BitString bob = alice;
    bob.flip(at);
    Transcript t;
    const auto [a, b] = correct(alice, bob, eps, 1234 + at, &t);
    ASSERT_EQ(b.bits, alice) << at;
    EXPECT_EQ(a.corrected, 1u);

    // Position of the error after the first shuffle, from the public seed.
    const auto first = decode_shuffle_seed(t.frames().front().message());
    ASSERT_EQ(first.word_length, 16u);
    const auto perm = shuffle_permutation(64, first.seed);
    const std::size_t pos = std::find(perm.begin(), perm.end(), at) - perm.begin();
    const std::size_t word = pos / 16;
    const int expected_steps = oracle::bisection_steps(word * 16, word * 16 + 16, pos);
    EXPECT_EQ(expected_steps, 4);

    std::size_t round1_items = 0;
    for (const auto& f : t.frames()) {
      if (f.kind != MessageKind::ParityReply) continue;
      const auto r = decode_parity_reply(f.message());
      if (r.round == 1) round1_items += r.items.size();
    }
    EXPECT_EQ(round1_items, 4u + static_cast<std::size_t>(expected_steps)) << at;
    // two clean rounds of 32-bit words follow
    EXPECT_EQ(a.rounds, 3u);
    EXPECT_EQ(a.leak_bits, 4u + 4u + 2u + 2u);
  }
}

TEST(Correct, AliceNeverChangesAndLeakAgrees) {
  const BitString alice(oracle::random_bits(2000, 5));
  const BitString bob = noisy_copy(alice, 0.04, 6);
  Transcript t;
  const auto [a, b] = correct(alice, bob, 0.04, 77, &t);
  EXPECT_EQ(a.bits, alice);
  EXPECT_EQ(b.bits, alice);
  EXPECT_EQ(a.leak_bits, b.leak_bits);
  EXPECT_EQ(a.corrected, b.corrected);
  EXPECT_EQ(b.corrected, alice.hamming_distance(bob));
  EXPECT_EQ(scan_transcript(t).parity_bits, a.leak_bits);
  EXPECT_DOUBLE_EQ(a.epsilon_measured, static_cast<double>(a.corrected) / 2000);
}

TEST(Correct, DeterministicInSeed) {
  const BitString alice(oracle::random_bits(3000, 8));
  const BitString bob = noisy_copy(alice, 0.03, 9);
  Transcript t1, t2;
  correct(alice, bob, 0.03, 10, &t1);
  correct(alice, bob, 0.03, 10, &t2);
  EXPECT_EQ(t1.frames(), t2.frames());
}

TEST(Correct, LeakEfficiencyNearTarget) {
  for (double eps : {0.01, 0.03, 0.05}) {
    double ratio = 0;
    const int trials = 10;
    for (int t = 0; t < trials; ++t) {
      const BitString alice(oracle::random_bits(10000, 100 + t));
      const BitString bob = noisy_copy(alice, eps, 200 + t);
      const auto [a, b] = correct(alice, bob, eps, 300 + t);
      EXPECT_EQ(b.bits, alice);
      ratio += static_cast<double>(a.leak_bits) / (10000 * oracle::entropy(eps));
    }
    ratio /= trials;
    EXPECT_GE(ratio, 1.05) << eps;
    EXPECT_LE(ratio, 1.35) << eps;
  }
}

TEST(Correct, ResidualErrorsAreRare) {
  int equal = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const double eps = 0.01 + 0.09 * (t % 10) / 9.0;
    const BitString alice(oracle::random_bits(10000, 5000 + t));
    const BitString bob = noisy_copy(alice, eps, 9000 + t);
    const auto [a, b] = correct(alice, bob, eps, 13000 + t);
    if (a.bits == b.bits) ++equal;
  }
  EXPECT_GE(equal, 999);
}

TEST(Correct, SmallKeysUseOneWord) {
  const BitString alice = BitString::from_text("1011001");
  BitString bob = alice;
  bob.flip(4);
  const auto [a, b] = correct(alice, bob, 0.1, 3);
  EXPECT_EQ(b.bits, alice);
}

TEST(Correct, BobRejectsMismatchedReplyRanges) {
  ReconcileBob bob(BitString(oracle::random_bits(64, 1)));
  PhaseEndpoint ep(1, bob);
  ep.start();
  const auto req = ep.handle({MessageKind::ShuffleSeed, kWireVersion, 1, 1, encode(ShuffleSeed{1, 5, 16}).payload});
  ASSERT_EQ(req.at(0).kind, MessageKind::ParityRequest);
  const auto bad = encode(ParityReply{1, {{0, 15, false}}});
  EXPECT_EQ(ep.handle({MessageKind::ParityReply, kWireVersion, 1, 3, bad.payload}).at(0).kind, MessageKind::Abort);
}

TEST(Correct, AliceRejectsOutOfRangeRequest) {
  ReconcileAlice alice(BitString(oracle::random_bits(64, 1)), 0.05, 1);
  PhaseEndpoint ep(1, alice);
  ASSERT_EQ(ep.start().at(0).kind, MessageKind::ShuffleSeed);
  const auto bad = encode(ParityRequest{1, {{0, 65}}});
  EXPECT_EQ(ep.handle({MessageKind::ParityRequest, kWireVersion, 1, 2, bad.payload}).at(0).kind,
            MessageKind::Abort);
}
