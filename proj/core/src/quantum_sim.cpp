#include "fsqkd/quantum_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "fsqkd/rng.hpp"

namespace fsqkd {

std::size_t TransmissionOutcome::single_detections() const {
  return static_cast<std::size_t>(
      std::count_if(detections.begin(), detections.end(), [](const auto& d) { return !d.multi; }));
}

std::size_t TransmissionOutcome::multi_detections() const {
  return detections.size() - single_detections();
}

std::uint32_t slots_per_transmission(const TransmitterParams& tx) {
  tx.validate();
  const double n = std::round(tx.clock_rate_hz);
  if (n < 1.0 || n > 4.0e9) throw std::invalid_argument("clock_rate_hz out of range for a 1-s run");
  return static_cast<std::uint32_t>(n);
}

double background_fire_probability(const LinkParams& lp) {
  lp.validate();
  const double p = 4.0 * lp.ch.background_c / lp.tx.clock_rate_hz;
  if (p > 1.0) throw std::invalid_argument("background_c too large for the clock rate");
  return p;
}

TransmissionOutcome simulate_transmission(const LinkParams& lp, std::uint64_t seed) {
  lp.validate();
  TransmissionOutcome out;
  out.link = lp;
  out.seed = seed;

  const std::uint32_t slots = slots_per_transmission(lp.tx);
  const double p_arrive = eta_opt(lp.ch) * lp.rx.eta_rec * lp.rx.eta_fil * lp.rx.eta_det;
  const double p_rectilinear = lp.rx.eta_bb84;
  const double p_background = background_fire_probability(lp);
  const double p_misalign = lp.tx.misalignment_error;
  const double mu = lp.tx.mu;

  Rng rng(derive_seed(seed, streams::kQuantumChannel));
  out.pulses.resize(slots);
  out.detections.reserve(static_cast<std::size_t>(
      2.0 * slots * (mu * p_arrive + 4.0 * p_background)) + 16);

  for (std::uint32_t slot = 0; slot < slots; ++slot) {
    const std::uint64_t choice = rng.next_u64();
    const bool bit = (choice >> 63) != 0;
    const Basis basis = ((choice >> 62) & 1u) ? Basis::Diagonal : Basis::Rectilinear;
    out.pulses[slot] = PulseRecord{slot, bit, basis};

    unsigned fired = 0;
    const unsigned photons = rng.poisson(mu);
    for (unsigned k = 0; k < photons; ++k) {
      if (!rng.bernoulli(p_arrive)) continue;
      const Basis measured = rng.bernoulli(p_rectilinear) ? Basis::Rectilinear : Basis::Diagonal;
      bool value;
      if (measured == basis) {
        value = bit;
        if (p_misalign > 0.0 && rng.bernoulli(p_misalign)) value = !value;
      } else {
        value = rng.coin();
      }
      fired |= 1u << static_cast<unsigned>(detector_for(measured, value));
    }
    for (unsigned d = 0; d < 4; ++d) {
      if (rng.bernoulli(p_background)) fired |= 1u << d;
    }
    if (fired == 0) continue;
    out.detections.push_back(DetectionRecord{
        slot, static_cast<Detector>(std::countr_zero(fired)), std::popcount(fired) > 1});
  }
  return out;
}

BackgroundCalibration empirical_background_c(const TransmissionOutcome& outcome) {
  if (outcome.link.tx.mu != 0.0) {
    throw std::logic_error("empirical_background_c requires a mu = 0 transmission");
  }
  BackgroundCalibration cal;
  for (const auto& d : outcome.detections) {
    if (d.multi) continue;
    if (d.slot >= outcome.pulses.size()) throw std::invalid_argument("detection outside pulse record");
    const auto idx = static_cast<std::size_t>(d.detector);
    ++cal.detections[idx];
    const PulseRecord& p = outcome.pulses[d.slot];
    if (detector_basis(d.detector) != p.basis) continue;
    if (detector_bit(d.detector) != p.bit) ++cal.sifted_errors[idx];
  }
  std::size_t total = 0;
  for (auto e : cal.sifted_errors) total += e;
  cal.c_estimate = static_cast<double>(total) / 4.0;
  return cal;
}

}  // namespace fsqkd
