#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "fsqkd/bit_string.hpp"
#include "fsqkd/endpoint.hpp"
#include "fsqkd/rng.hpp"

namespace fsqkd {

struct ReconciledKey {
  BitString bits;
  double epsilon_measured = 0.0;  ///< corrected / n
  std::size_t corrected = 0;
  std::size_t leak_bits = 0;      ///< parity bits disclosed by Alice
  std::uint32_t rounds = 0;

  std::size_t n() const { return bits.size(); }
};

inline constexpr std::uint32_t kMaxReconcileRounds = 64;

/// First-round word length: round(0.73/eps) clamped to [8, n]. Keys shorter
/// than 16 bits use one word; eps == 0 means one word for the whole key.
std::size_t initial_word_length(double epsilon_estimate,
                                std::size_t n = std::numeric_limits<std::uint32_t>::max());

/// Word length doubles each round, capped at max(first, ceil(n/2)).
std::size_t next_word_length(std::size_t current, std::size_t first, std::size_t n);

/// Fisher-Yates permutation of [0, n) driven by `seed`. perm[pos] = key index.
std::vector<std::uint32_t> shuffle_permutation(std::size_t n, std::uint64_t seed);

/// Alice's side of the bisective search. She picks each round's shuffle seed
/// and word length and answers parity requests; her bits never change.
class ReconcileAlice final : public Phase {
 public:
  ReconcileAlice(BitString key, double epsilon_estimate, std::uint64_t shuffle_seed);

  std::vector<Message> start() override;
  std::vector<Message> on_message(const Message& m) override;
  bool done() const override { return finished_; }

  ReconciledKey result() const;

 private:
  Message begin_round();

  BitString key_;
  Rng seeds_;
  std::size_t first_word_ = 0;
  std::vector<std::vector<std::uint32_t>> perms_;
  std::vector<std::size_t> words_;
  std::size_t leak_ = 0;
  std::size_t corrected_ = 0;
  bool finished_ = false;
};

/// Bob's side: requests parities, bisects mismatching words and flips his
/// own bits. After every correction, words of earlier rounds that now
/// disagree are bisected too (lowest round first).
class ReconcileBob final : public Phase {
 public:
  explicit ReconcileBob(BitString key);

  std::vector<Message> start() override;
  std::vector<Message> on_message(const Message& m) override;
  bool done() const override { return state_ == State::Finished; }

  ReconciledKey result() const;

 private:
  enum class State { AwaitSeed, AwaitTop, AwaitBisect, Finished };
  struct Round {
    std::vector<std::uint32_t> perm;
    std::vector<std::uint32_t> pos;
    std::size_t word = 0;
    std::vector<std::uint8_t> alice_parity;
    std::vector<std::uint8_t> bob_parity;
  };

  bool range_parity(const Round& r, std::uint32_t start, std::uint32_t end) const;
  void flip(std::uint32_t index);
  std::vector<Message> next_batch();
  std::vector<Message> step_batch();
  Message request(std::uint32_t round, std::vector<BlockRange> blocks);

  BitString key_;
  State state_ = State::AwaitSeed;
  std::vector<Round> rounds_;
  std::uint32_t pending_round_ = 0;
  std::vector<BlockRange> pending_;
  std::vector<BlockRange> active_;
  std::uint32_t top_mismatches_ = 0;
  std::uint32_t zero_streak_ = 0;
  std::size_t leak_ = 0;
  std::size_t corrected_ = 0;
};

/// Runs both sides in-process. Returns (Alice, Bob).
std::pair<ReconciledKey, ReconciledKey> correct(const BitString& alice, const BitString& bob,
                                                double epsilon_estimate, std::uint64_t shuffle_seed,
                                                Transcript* transcript = nullptr);

}  // namespace fsqkd
