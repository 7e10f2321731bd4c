#include "fsqkd/privacy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fsqkd/link_model.hpp"
#include "fsqkd/rng.hpp"

namespace fsqkd {

void SecrecyPolicy::validate() const {
  if (!(safety_s >= 0.0)) throw std::invalid_argument("safety_s must be >= 0");
  if (!(ec_overhead >= 1.0)) throw std::invalid_argument("ec_overhead must be >= 1");
}

BitBias measure_bias(const BitString& bits) {
  if (bits.empty()) return {};
  const double p1 = static_cast<double>(bits.count_ones()) / static_cast<double>(bits.size());
  return {1.0 - p1, p1};
}

std::uint64_t BudgetAudit::total() const {
  return std::accumulate(items.begin(), items.end(), std::uint64_t{0});
}

double SecrecyBudget::deductions() const {
  return multi_photon_bits + breidbart_bits + bias_bits + ec_leak_bits + safety_bits;
}

BudgetAudit SecrecyBudget::audit() const {
  BudgetAudit a;
  a.n = n;
  a.f_secret = f_secret;
  const std::array<double, 5> raw = {multi_photon_bits, breidbart_bits, bias_bits, ec_leak_bits,
                                     safety_bits};
  const double sum = deductions();
  const std::uint64_t target = n - f_secret;
  if (target == 0 || sum <= 0.0) return a;

  std::array<double, 5> frac{};
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double quota = std::max(0.0, raw[i]) * static_cast<double>(target) / sum;
    a.items[i] = static_cast<std::uint64_t>(std::floor(quota));
    frac[i] = quota - std::floor(quota);
    assigned += a.items[i];
  }
  std::array<std::size_t, 5> order{0, 1, 2, 3, 4};
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return frac[x] > frac[y]; });
  for (std::size_t k = 0; assigned < target; k = (k + 1) % order.size()) {
    ++a.items[order[k]];
    ++assigned;
  }
  return a;
}

double collision_entropy_rate(double mu, double eps) {
  return 1.0 - mu - 4.0 * eps * std::log2(1.5);
}

double bias_deduction(std::uint64_t n, BitBias bias) {
  const double c = bias.p0 * bias.p0 + bias.p1 * bias.p1;
  if (!(c > 0.0)) throw std::domain_error("bias probabilities must not both be zero");
  return std::max(0.0, static_cast<double>(n) * (1.0 + std::log2(c)));
}

SecrecyBudget secret_fraction(std::uint64_t n, double mu, double eps, const SecrecyPolicy& policy,
                              BitBias bias, std::optional<double> ec_leak_actual) {
  policy.validate();
  if (!(eps >= 0.0) || eps > 0.5) throw std::domain_error("eps outside [0, 0.5]");
  SecrecyBudget b;
  b.n = n;
  if (n == 0) return b;
  const double dn = static_cast<double>(n);
  b.multi_photon_bits = dn * mu;
  b.breidbart_bits = dn * 4.0 * eps * std::log2(1.5);
  b.bias_bits = bias_deduction(n, bias);
  b.ec_leak_bits = ec_leak_actual ? *ec_leak_actual : policy.ec_overhead * binary_entropy(eps) * dn;
  b.safety_bits = policy.safety_s;
  const double f = std::floor(dn - b.deductions());
  b.f_secret = f > 0.0 ? static_cast<std::uint64_t>(f) : 0;
  return b;
}

std::vector<SubsetMask> derive_subsets(std::size_t n, std::size_t f, std::array<std::uint64_t, 2> seed) {
  Rng rng(seed[0], seed[1]);
  const std::size_t words = (n + 63) / 64;
  const std::uint64_t tail = (n % 64) ? (~std::uint64_t{0} >> (64 - n % 64)) : ~std::uint64_t{0};
  std::vector<SubsetMask> out(f, SubsetMask(words));
  for (auto& mask : out) {
    for (auto& w : mask) w = rng.next_u64();
    if (words) mask.back() &= tail;
  }
  return out;
}

BitString subset_parities(const BitString& key, const std::vector<SubsetMask>& subsets) {
  const auto words = key.to_words();
  BitString out;
  out.reserve(subsets.size());
  for (const auto& mask : subsets) {
    if (mask.size() != words.size()) throw std::invalid_argument("subset size does not match key");
    unsigned ones = 0;
    for (std::size_t w = 0; w < words.size(); ++w) ones += std::popcount(words[w] & mask[w]);
    out.push_back(ones & 1u);
  }
  return out;
}

BitString extract(const BitString& key, std::size_t f, std::array<std::uint64_t, 2> seed) {
  if (f == 0 || key.empty()) return {};
  return subset_parities(key, derive_subsets(key.size(), f, seed));
}

// ---------------------------------------------------------------------------

KeyCheckPhase::KeyCheckPhase(Side side, BitString key, std::uint32_t check_bits)
    : side_(side), key_(std::move(key)), check_(std::min<std::size_t>(check_bits, key_.size())) {}

std::vector<Message> KeyCheckPhase::start() {
  if (side_ == Side::Bob) return {encode(KeyCheckPayload{prefix()})};
  return {};
}

void KeyCheckPhase::compare(const BitString& theirs) {
  if (theirs.size() != check_) throw ProtocolError("KEYCHECK length mismatch");
  passed_ = theirs == prefix();
  key_ = passed_ ? key_.slice(check_, key_.size() - check_) : BitString{};
  done_ = true;
}

std::vector<Message> KeyCheckPhase::on_message(const Message& m) {
  if (done_) throw ProtocolError("key check already finished");
  if (m.kind != MessageKind::KeyCheck) throw ProtocolError("expected KEYCHECK");
  const auto theirs = decode_key_check(m).bits;
  if (side_ == Side::Alice) {
    auto mine = prefix();
    compare(theirs);
    return {encode(KeyCheckPayload{std::move(mine)})};
  }
  compare(theirs);
  return {};
}

KeyCheckOutcome key_check(const BitString& alice, const BitString& bob, const SecrecyPolicy& policy,
                          Transcript* transcript) {
  if (alice.size() != bob.size()) throw std::invalid_argument("key_check: key lengths differ");
  KeyCheckPhase a_phase(Side::Alice, alice, policy.keycheck_bits);
  KeyCheckPhase b_phase(Side::Bob, bob, policy.keycheck_bits);
  PhaseEndpoint a(1, a_phase);
  PhaseEndpoint b(1, b_phase);
  drive_loopback(b, a, transcript);
  if (a.state() != Endpoint::State::Finished || b.state() != Endpoint::State::Finished) {
    throw ProtocolError("key check aborted");
  }
  return {a_phase.passed() && b_phase.passed(), a_phase.key(), b_phase.key()};
}

}  // namespace fsqkd
