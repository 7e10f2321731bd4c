#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "fsqkd/bit_string.hpp"
#include "fsqkd/endpoint.hpp"

namespace fsqkd {

struct SecrecyPolicy {
  double safety_s = 20.0;
  double ec_overhead = 1.19;       ///< leak estimate multiplier on h(eps)
  std::uint32_t keycheck_bits = 16;

  void validate() const;
};

/// Observed bit balance of the reconciled key.
struct BitBias {
  double p0 = 0.5;
  double p1 = 0.5;
};

BitBias measure_bias(const BitString& bits);

/// Integer split of the deductions. items + f_secret == n exactly.
struct BudgetAudit {
  static constexpr std::array<std::string_view, 5> kNames = {
      "multi_photon", "breidbart", "bias", "ec_leak", "safety"};
  std::array<std::uint64_t, 5> items{};
  std::uint64_t f_secret = 0;
  std::uint64_t n = 0;

  std::uint64_t total() const;  ///< sum of the itemized deductions
};

struct SecrecyBudget {
  std::uint64_t n = 0;
  double multi_photon_bits = 0;
  double breidbart_bits = 0;
  double bias_bits = 0;
  double ec_leak_bits = 0;
  double safety_bits = 0;
  std::uint64_t f_secret = 0;

  double deductions() const;
  /// Largest-remainder apportionment of n - f_secret over the five items.
  BudgetAudit audit() const;
};

/// R(mu, eps) = 1 - mu - 4 eps log2(1.5). May be negative.
double collision_entropy_rate(double mu, double eps);

/// Bias deduction n (1 + log2(p0^2 + p1^2)); zero for a balanced key.
double bias_deduction(std::uint64_t n, BitBias bias);

/// F = floor(n - deductions), floored at 0. `ec_leak_actual` replaces the
/// ec_overhead * h(eps) * n estimate when given.
SecrecyBudget secret_fraction(std::uint64_t n, double mu, double eps, const SecrecyPolicy& policy,
                              BitBias bias = {}, std::optional<double> ec_leak_actual = std::nullopt);

/// Subset of [0, n) for output bit i, packed like BitString::to_words().
using SubsetMask = std::vector<std::uint64_t>;

/// The F subsets determined by a 128-bit public seed; each index is included
/// independently with probability 1/2.
std::vector<SubsetMask> derive_subsets(std::size_t n, std::size_t f, std::array<std::uint64_t, 2> seed);

/// Output bit i = parity of key bits in subsets[i].
BitString subset_parities(const BitString& key, const std::vector<SubsetMask>& subsets);

/// Privacy amplification of one side's reconciled key to f bits.
BitString extract(const BitString& key, std::size_t f, std::array<std::uint64_t, 2> seed);

/// Final key check: Bob sends his first `check_bits` bits, Alice answers
/// with hers. Both compare; on mismatch both destroy the key.
class KeyCheckPhase final : public Phase {
 public:
  KeyCheckPhase(Side side, BitString key, std::uint32_t check_bits);

  std::vector<Message> start() override;
  std::vector<Message> on_message(const Message& m) override;
  bool done() const override { return done_; }

  bool passed() const { return passed_; }
  /// Verified key with the check bits removed; empty when the check failed.
  const BitString& key() const { return key_; }
  std::size_t check_bits() const { return check_; }

 private:
  BitString prefix() const { return key_.slice(0, check_); }
  void compare(const BitString& theirs);

  Side side_;
  BitString key_;
  std::size_t check_;
  bool done_ = false;
  bool passed_ = false;
};

struct KeyCheckOutcome {
  bool passed = false;
  BitString alice;
  BitString bob;
};

/// Runs the key check in-process.
KeyCheckOutcome key_check(const BitString& alice, const BitString& bob, const SecrecyPolicy& policy,
                          Transcript* transcript = nullptr);

}  // namespace fsqkd
