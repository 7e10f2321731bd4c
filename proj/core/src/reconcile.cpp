#include "fsqkd/reconcile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fsqkd {

std::size_t initial_word_length(double eps, std::size_t n) {
  if (!(eps >= 0.0) || eps > 0.5) throw std::domain_error("epsilon estimate outside [0, 0.5]");
  if (n == 0) return 0;
  if (n < 16 || eps == 0.0) return n;
  const double k = std::round(0.73 / eps);
  if (k >= static_cast<double>(n)) return n;
  return std::clamp<std::size_t>(static_cast<std::size_t>(k), 8, n);
}

std::size_t next_word_length(std::size_t current, std::size_t first, std::size_t n) {
  const std::size_t cap = std::max(first, (n + 1) / 2);
  return std::min(2 * current, cap);
}

std::vector<std::uint32_t> shuffle_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

// ---------------------------------------------------------------------------

ReconcileAlice::ReconcileAlice(BitString key, double eps, std::uint64_t shuffle_seed)
    : key_(std::move(key)), seeds_(shuffle_seed), first_word_(initial_word_length(eps, key_.size())) {}

Message ReconcileAlice::begin_round() {
  const std::size_t n = key_.size();
  const std::size_t word = words_.empty() ? first_word_ : next_word_length(words_.back(), first_word_, n);
  const std::uint64_t seed = seeds_.next_u64();
  perms_.push_back(shuffle_permutation(n, seed));
  words_.push_back(word);
  return encode(ShuffleSeed{static_cast<std::uint32_t>(perms_.size()), seed,
                            static_cast<std::uint32_t>(word)});
}

std::vector<Message> ReconcileAlice::start() {
  if (key_.empty()) {
    finished_ = true;
    return {};
  }
  return {begin_round()};
}

std::vector<Message> ReconcileAlice::on_message(const Message& m) {
  if (finished_) throw ProtocolError("reconciliation already finished");
  const auto current = static_cast<std::uint32_t>(perms_.size());
  if (m.kind == MessageKind::ParityRequest) {
    const auto req = decode_parity_request(m);
    if (req.round == 0 || req.round > current) throw ProtocolError("parity request for unknown round");
    if (req.blocks.empty()) throw ProtocolError("empty parity request");
    const auto& perm = perms_[req.round - 1];
    ParityReply reply;
    reply.round = req.round;
    reply.items.reserve(req.blocks.size());
    for (const auto& b : req.blocks) {
      if (b.start >= b.end || b.end > key_.size()) throw ProtocolError("parity range out of bounds");
      bool p = false;
      for (std::uint32_t j = b.start; j < b.end; ++j) p ^= key_[perm[j]];
      reply.items.push_back({b.start, b.end, p});
    }
    leak_ += reply.items.size();
    return {encode(reply)};
  }
  if (m.kind == MessageKind::RoundDone) {
    const auto rd = decode_round_done(m);
    if (rd.round != current) throw ProtocolError("ROUND_DONE for the wrong round");
    if (rd.corrected_total < corrected_ || rd.corrected_total > key_.size()) {
      throw ProtocolError("implausible corrected count");
    }
    corrected_ = rd.corrected_total;
    if (rd.finished || current >= kMaxReconcileRounds) {
      finished_ = true;
      return {};
    }
    return {begin_round()};
  }
  throw ProtocolError("unexpected " + std::string(to_string(m.kind)) + " during reconciliation");
}

ReconciledKey ReconcileAlice::result() const {
  ReconciledKey r;
  r.bits = key_;
  r.corrected = corrected_;
  r.epsilon_measured = key_.empty() ? 0.0 : static_cast<double>(corrected_) / key_.size();
  r.leak_bits = leak_;
  r.rounds = static_cast<std::uint32_t>(perms_.size());
  return r;
}

// ---------------------------------------------------------------------------

ReconcileBob::ReconcileBob(BitString key) : key_(std::move(key)) {
  if (key_.empty()) state_ = State::Finished;
}

std::vector<Message> ReconcileBob::start() { return {}; }

bool ReconcileBob::range_parity(const Round& r, std::uint32_t start, std::uint32_t end) const {
  bool p = false;
  for (std::uint32_t j = start; j < end; ++j) p ^= key_[r.perm[j]];
  return p;
}

void ReconcileBob::flip(std::uint32_t index) {
  key_.flip(index);
  ++corrected_;
  for (auto& r : rounds_) r.bob_parity[r.pos[index] / r.word] ^= 1;
}

Message ReconcileBob::request(std::uint32_t round, std::vector<BlockRange> blocks) {
  pending_round_ = round;
  pending_ = blocks;
  return encode(ParityRequest{round, std::move(blocks)});
}

std::vector<Message> ReconcileBob::on_message(const Message& m) {
  const std::uint32_t n = static_cast<std::uint32_t>(key_.size());
  if (state_ == State::AwaitSeed) {
    if (m.kind != MessageKind::ShuffleSeed) throw ProtocolError("expected SHUFFLE_SEED");
    const auto ss = decode_shuffle_seed(m);
    if (ss.round != rounds_.size() + 1) throw ProtocolError("SHUFFLE_SEED out of order");
    if (ss.word_length == 0 || ss.word_length > n) throw ProtocolError("bad word length");
    Round r;
    r.perm = shuffle_permutation(n, ss.seed);
    r.pos.resize(n);
    for (std::uint32_t j = 0; j < n; ++j) r.pos[r.perm[j]] = j;
    r.word = ss.word_length;
    const std::size_t blocks = (n + r.word - 1) / r.word;
    r.alice_parity.assign(blocks, 0);
    r.bob_parity.assign(blocks, 0);
    std::vector<BlockRange> ranges;
    ranges.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      const auto s = static_cast<std::uint32_t>(b * r.word);
      const auto e = static_cast<std::uint32_t>(std::min<std::size_t>(n, (b + 1) * r.word));
      r.bob_parity[b] = range_parity(r, s, e);
      ranges.push_back({s, e});
    }
    rounds_.push_back(std::move(r));
    state_ = State::AwaitTop;
    return {request(ss.round, std::move(ranges))};
  }
  if (state_ == State::Finished) throw ProtocolError("reconciliation already finished");
  if (m.kind != MessageKind::ParityReply) throw ProtocolError("expected PARITY_REPLY");
  const auto reply = decode_parity_reply(m);
  if (reply.round != pending_round_ || reply.items.size() != pending_.size()) {
    throw ProtocolError("PARITY_REPLY does not answer the request");
  }
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    if (reply.items[i].start != pending_[i].start || reply.items[i].end != pending_[i].end) {
      throw ProtocolError("PARITY_REPLY ranges differ from the request");
    }
  }
  leak_ += reply.items.size();

  if (state_ == State::AwaitTop) {
    auto& r = rounds_.back();
    top_mismatches_ = 0;
    for (std::size_t b = 0; b < reply.items.size(); ++b) {
      r.alice_parity[b] = reply.items[b].parity;
      if (r.alice_parity[b] != r.bob_parity[b]) ++top_mismatches_;
    }
    return next_batch();
  }

  // Bisection step: each pending range is the left half of an active range.
  const Round& r = rounds_[pending_round_ - 1];
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    auto& a = active_[i];
    const auto mid = pending_[i].end;
    if (range_parity(r, a.start, mid) != reply.items[i].parity) {
      a.end = mid;
    } else {
      a.start = mid;
    }
  }
  return step_batch();
}

std::vector<Message> ReconcileBob::next_batch() {
  for (std::size_t ri = 0; ri < rounds_.size(); ++ri) {
    const Round& r = rounds_[ri];
    active_.clear();
    for (std::size_t b = 0; b < r.alice_parity.size(); ++b) {
      if (r.alice_parity[b] == r.bob_parity[b]) continue;
      active_.push_back({static_cast<std::uint32_t>(b * r.word),
                         static_cast<std::uint32_t>(std::min(key_.size(), (b + 1) * r.word))});
    }
    if (!active_.empty()) {
      pending_round_ = static_cast<std::uint32_t>(ri + 1);
      return step_batch();
    }
  }
  const auto round = static_cast<std::uint32_t>(rounds_.size());
  zero_streak_ = top_mismatches_ == 0 ? zero_streak_ + 1 : 0;
  const bool finished = zero_streak_ >= 2 || round >= kMaxReconcileRounds;
  state_ = finished ? State::Finished : State::AwaitSeed;
  return {encode(RoundDone{round, top_mismatches_, static_cast<std::uint32_t>(corrected_), finished})};
}

std::vector<Message> ReconcileBob::step_batch() {
  const std::uint32_t round = pending_round_;
  std::vector<BlockRange> still;
  for (const auto& a : active_) {
    if (a.end - a.start == 1) {
      flip(rounds_[round - 1].perm[a.start]);
    } else {
      still.push_back(a);
    }
  }
  active_ = std::move(still);
  if (active_.empty()) return next_batch();
  std::vector<BlockRange> left;
  left.reserve(active_.size());
  for (const auto& a : active_) left.push_back({a.start, a.start + (a.end - a.start) / 2});
  state_ = State::AwaitBisect;
  return {request(round, std::move(left))};
}

ReconciledKey ReconcileBob::result() const {
  ReconciledKey r;
  r.bits = key_;
  r.corrected = corrected_;
  r.epsilon_measured = key_.empty() ? 0.0 : static_cast<double>(corrected_) / key_.size();
  r.leak_bits = leak_;
  r.rounds = static_cast<std::uint32_t>(rounds_.size());
  return r;
}

std::pair<ReconciledKey, ReconciledKey> correct(const BitString& alice, const BitString& bob,
                                                double eps, std::uint64_t shuffle_seed,
                                                Transcript* transcript) {
  if (alice.size() != bob.size()) throw std::invalid_argument("correct: key lengths differ");
  ReconcileAlice a_phase(alice, eps, shuffle_seed);
  ReconcileBob b_phase(bob);
  PhaseEndpoint a(1, a_phase);
  PhaseEndpoint b(1, b_phase);
  drive_loopback(a, b, transcript);
  if (a.state() == Endpoint::State::Aborted || b.state() == Endpoint::State::Aborted) {
    throw ProtocolError("reconciliation aborted: " +
                        (a.abort_reason().empty() ? b.abort_reason() : a.abort_reason()));
  }
  return {a_phase.result(), b_phase.result()};
}

}  // namespace fsqkd
