#include "fsqkd/link_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fsqkd {
namespace {

void require_efficiency(double v, const char* name) {
  if (!(v > 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1]");
  }
}

}  // namespace

void TransmitterParams::validate() const {
  if (!(mu >= 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in [0, 1)");
  if (!(clock_rate_hz > 0.0) || !std::isfinite(clock_rate_hz)) {
    throw std::invalid_argument("clock_rate_hz must be positive");
  }
  if (!(misalignment_error >= 0.0 && misalignment_error <= 0.005)) {
    throw std::invalid_argument("misalignment_error must lie in [0, 0.005]");
  }
}

void ReceiverParams::validate() const {
  require_efficiency(eta_rec, "eta_rec");
  require_efficiency(eta_fil, "eta_fil");
  require_efficiency(eta_bb84, "eta_bb84");
  require_efficiency(eta_det, "eta_det");
}

void ChannelParams::validate() const {
  require_efficiency(eta_trans, "eta_trans");
  require_efficiency(eta_geo, "eta_geo");
  if (!(background_c >= 0.0) || !std::isfinite(background_c)) {
    throw std::invalid_argument("background_c must be finite and non-negative");
  }
}

double eta_opt(const ChannelParams& ch) {
  ch.validate();
  return ch.eta_trans * ch.eta_geo;
}

double receiver_factor_d(const ReceiverParams& rx) {
  const double p = rx.product();
  if (!(p > 0.0)) throw std::domain_error("receiver_factor_d: zero receiver efficiency");
  rx.validate();
  return 4e-6 / p;
}

double sift_probability(const LinkParams& lp) {
  lp.validate();
  return -std::expm1(-lp.tx.mu * eta_opt(lp.ch) * lp.rx.product());
}

BerEstimate expected_ber(const LinkParams& lp) {
  lp.validate();
  const double signal = lp.tx.mu * eta_opt(lp.ch);
  if (!(signal > 0.0)) throw std::domain_error("expected_ber: mu * eta_opt must be positive");
  const double eps = lp.ch.background_c * receiver_factor_d(lp.rx) / signal;
  if (eps > 0.5) return {0.5, true};
  return {eps, false};
}

double channel_parameter(const ChannelParams& ch) {
  const double e = eta_opt(ch);
  if (ch.background_c == 0.0) return kInfiniteChannelParameter;
  return e / ch.background_c;
}

double binary_entropy(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::domain_error("binary_entropy: argument outside [0, 1]");
  if (eps == 0.0 || eps == 1.0) return 0.0;
  return -eps * std::log2(eps) - (1.0 - eps) * std::log2(1.0 - eps);
}

}  // namespace fsqkd
