#include "fsqkd/randcheck.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fsqkd/fips_bounds.hpp"

namespace fsqkd {

std::string fips::bounds_text() {
  std::ostringstream s;
  s << "sample_bits " << kSampleBits << '\n';
  s << "monobit " << kMonobitLower << ' ' << kMonobitUpper << '\n';
  s << "poker " << kPokerLower << ' ' << kPokerUpper << '\n';
  for (const auto& r : kRuns) s << "run " << r.length << ' ' << r.lower << ' ' << r.upper << '\n';
  s << "long_run " << kLongRun << '\n';
  return s.str();
}

FipsResult fips_140_2(const BitString& bits) {
  if (bits.size() != fips::kSampleBits) throw std::domain_error("FIPS 140-2 tests need exactly 20000 bits");
  FipsResult r;

  r.monobit.ones = static_cast<long>(bits.count_ones());
  r.monobit.pass = r.monobit.ones > fips::kMonobitLower && r.monobit.ones < fips::kMonobitUpper;

  std::array<long, 16> f{};
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    ++f[(bits[i] << 3) | (bits[i + 1] << 2) | (bits[i + 2] << 1) | bits[i + 3]];
  }
  double sum = 0;
  for (long c : f) sum += static_cast<double>(c) * static_cast<double>(c);
  r.poker.statistic = 16.0 / 5000.0 * sum - 5000.0;
  r.poker.pass = r.poker.statistic > fips::kPokerLower && r.poker.statistic < fips::kPokerUpper;

  long run = 0;
  auto close_run = [&](bool value, long len) {
    auto& bucket = value ? r.runs.ones : r.runs.zeros;
    ++bucket[std::min<long>(len, 6) - 1];
    r.long_run.max_run = std::max(r.long_run.max_run, len);
  };
  for (std::size_t i = 0; i < bits.size(); ++i) {
    ++run;
    if (i + 1 == bits.size() || bits[i + 1] != bits[i]) {
      close_run(bits[i], run);
      run = 0;
    }
  }
  r.runs.pass = true;
  for (std::size_t k = 0; k < 6; ++k) {
    const auto& b = fips::kRuns[k];
    r.runs.zeros_pass[k] = r.runs.zeros[k] >= b.lower && r.runs.zeros[k] <= b.upper;
    r.runs.ones_pass[k] = r.runs.ones[k] >= b.lower && r.runs.ones[k] <= b.upper;
    r.runs.pass = r.runs.pass && r.runs.zeros_pass[k] && r.runs.ones_pass[k];
  }
  r.long_run.pass = r.long_run.max_run < fips::kLongRun;
  r.pass = r.monobit.pass && r.poker.pass && r.runs.pass && r.long_run.pass;
  return r;
}

namespace {
constexpr std::array<double, 16> kExpected = {
    0.7326495, 1.5374383, 2.4016068, 3.3112247, 4.2534266, 5.2177052, 6.1962507, 7.1836656,
    8.1764248, 9.1723243, 10.170032, 11.168765, 12.168070, 13.167693, 14.167488, 15.167379};
constexpr std::array<double, 16> kVariance = {0.690, 1.338, 1.901, 2.358, 2.705, 2.954, 3.125, 3.238,
                                              3.311, 3.356, 3.384, 3.401, 3.410, 3.416, 3.419, 3.421};
}  // namespace

double maurer_expected(unsigned L) {
  if (L < 1 || L > 16) throw std::domain_error("L must be in 1..16");
  return kExpected[L - 1];
}

double maurer_variance(unsigned L) {
  if (L < 1 || L > 16) throw std::domain_error("L must be in 1..16");
  return kVariance[L - 1];
}

MaurerResult maurer_universal(const BitString& bits, unsigned L, std::size_t Q, std::size_t K, double y) {
  MaurerResult r;
  r.L = L;
  r.expected = maurer_expected(L);
  r.variance = maurer_variance(L);
  const std::size_t blocks = bits.size() / L;
  r.Q = Q ? Q : (std::size_t{10} << L);
  if (blocks <= r.Q) throw std::domain_error("not enough bits for the initialization segment");
  r.K = K ? K : blocks - r.Q;
  if (r.Q + r.K > blocks) throw std::domain_error("not enough bits for Q + K blocks");

  std::vector<std::size_t> last(std::size_t{1} << L, 0);
  auto block = [&](std::size_t i) {  // 1-based
    std::size_t v = 0;
    const std::size_t base = (i - 1) * L;
    for (unsigned j = 0; j < L; ++j) v = (v << 1) | bits[base + j];
    return v;
  };
  for (std::size_t i = 1; i <= r.Q; ++i) last[block(i)] = i;
  double sum = 0;
  for (std::size_t i = r.Q + 1; i <= r.Q + r.K; ++i) {
    const auto b = block(i);
    sum += std::log2(static_cast<double>(i - last[b]));
    last[b] = i;
  }
  r.statistic = sum / static_cast<double>(r.K);
  const double k = static_cast<double>(r.K);
  const double c = 0.7 - 0.8 / L + (4.0 + 32.0 / L) * std::pow(k, -3.0 / L) / 15.0;
  r.sigma = c * std::sqrt(r.variance / k);
  r.lower = r.expected - y * r.sigma;
  r.upper = r.expected + y * r.sigma;
  r.pass = std::abs(r.statistic - r.expected) <= y * r.sigma;
  return r;
}

KvSection to_section(const FipsResult& r, std::string_view name) {
  KvSection s;
  s.name = std::string(name);
  auto flag = [](bool b) { return std::string(b ? "pass" : "fail"); };
  s.set("monobit_ones", std::to_string(r.monobit.ones));
  s.set("monobit_bounds", std::to_string(fips::kMonobitLower) + " < x < " + std::to_string(fips::kMonobitUpper));
  s.set("monobit", flag(r.monobit.pass));
  s.set("poker_statistic", format_double(r.poker.statistic));
  s.set("poker_bounds", format_double(fips::kPokerLower) + " < x < " + format_double(fips::kPokerUpper));
  s.set("poker", flag(r.poker.pass));
  for (std::size_t k = 0; k < 6; ++k) {
    const auto len = std::to_string(k + 1) + (k == 5 ? "+" : "");
    const auto& b = fips::kRuns[k];
    const auto bounds = " [" + std::to_string(b.lower) + ", " + std::to_string(b.upper) + "]";
    s.set("runs0_" + len, std::to_string(r.runs.zeros[k]) + bounds + " " + flag(r.runs.zeros_pass[k]));
    s.set("runs1_" + len, std::to_string(r.runs.ones[k]) + bounds + " " + flag(r.runs.ones_pass[k]));
  }
  s.set("runs", flag(r.runs.pass));
  s.set("long_run_max", std::to_string(r.long_run.max_run));
  s.set("long_run", flag(r.long_run.pass));
  s.set("overall", flag(r.pass));
  return s;
}

KvSection to_section(const MaurerResult& r, std::string_view name) {
  KvSection s;
  s.name = std::string(name);
  s.set("L", std::to_string(r.L));
  s.set("Q", std::to_string(r.Q));
  s.set("K", std::to_string(r.K));
  s.set("statistic", format_double(r.statistic));
  s.set("expected", format_double(r.expected));
  s.set("sigma", format_double(r.sigma));
  s.set("interval", format_double(r.lower) + " " + format_double(r.upper));
  s.set("overall", r.pass ? "pass" : "fail");
  return s;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace fsqkd
