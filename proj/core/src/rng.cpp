#include "fsqkd/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fsqkd {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

namespace {
std::mt19937_64 seeded_engine(std::uint64_t hi, std::uint64_t lo) {
  std::seed_seq seq{static_cast<std::uint32_t>(hi >> 32), static_cast<std::uint32_t>(hi),
                    static_cast<std::uint32_t>(lo >> 32), static_cast<std::uint32_t>(lo)};
  return std::mt19937_64(seq);
}
}  // namespace

Rng::Rng(std::uint64_t seed_hi, std::uint64_t seed_lo) : engine_(seeded_engine(seed_hi, seed_lo)) {}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

unsigned Rng::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("Rng::poisson: negative mean");
  if (mean == 0.0) return 0;
  const double u = uniform();
  double p = std::exp(-mean);
  double cdf = p;
  unsigned k = 0;
  while (u >= cdf && k < 1000) {
    ++k;
    p *= mean / k;
    cdf += p;
  }
  return k;
}

double Rng::normal(double mean, double sigma) {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + sigma * z;
}

}  // namespace fsqkd
