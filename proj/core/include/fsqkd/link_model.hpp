#pragma once

#include <limits>

namespace fsqkd {

/// Alice's pulse source.
struct TransmitterParams {
  double mu = 0.5;                    ///< mean photon number per pulse (Poisson)
  double clock_rate_hz = 1'000'000.0; ///< pulses per 1-s transmission
  double misalignment_error = 0.0;    ///< intrinsic polarization error probability

  /// Throws std::invalid_argument. mu = 0 is accepted: it is the
  /// background-calibration mode of the transmitter.
  void validate() const;
};

/// Bob's receiver chain. Defaults are the 10-km system's values.
struct ReceiverParams {
  double eta_rec = 0.47;   ///< receiver optics transmission
  double eta_fil = 0.6;    ///< interference filter transmission
  double eta_bb84 = 0.5;   ///< basis-choice beamsplitter coefficient
  double eta_det = 0.61;   ///< single-photon detector efficiency

  void validate() const;
  /// eta_rec * eta_fil * eta_bb84 * eta_det
  double product() const { return eta_rec * eta_fil * eta_bb84 * eta_det; }
};

struct ChannelParams {
  double eta_trans = 0.81;   ///< atmospheric transmittance
  double eta_geo = 0.05;     ///< 1-s average geometric capture efficiency
  double background_c = 5.0; ///< sifted-key errors per detector per 1-s mu=0 run

  void validate() const;
};

struct LinkParams {
  TransmitterParams tx;
  ReceiverParams rx;
  ChannelParams ch;

  void validate() const {
    tx.validate();
    rx.validate();
    ch.validate();
  }
};

/// Atmospheric channel efficiency eta_trans * eta_geo.
double eta_opt(const ChannelParams& ch);

/// Receiver constant D = 4e-6 / (eta_rec eta_fil eta_bb84 eta_det).
double receiver_factor_d(const ReceiverParams& rx);

/// Probability that a transmitted pulse enters the sifted key.
double sift_probability(const LinkParams& lp);

struct BerEstimate {
  double value = 0.0;
  bool clamped = false;  ///< true when the model exceeded 0.5 (channel unusable)
};

/// Sifted-key error rate C*D/(mu*eta_opt), clamped to [0, 0.5].
/// Throws std::domain_error when mu*eta_opt == 0.
BerEstimate expected_ber(const LinkParams& lp);

/// Channel-quality parameter eta_opt/C. Returns +infinity when C == 0.
double channel_parameter(const ChannelParams& ch);

/// Standard binary entropy h(eps) in bits; throws std::domain_error outside [0,1].
double binary_entropy(double eps);

inline constexpr double kInfiniteChannelParameter = std::numeric_limits<double>::infinity();

}  // namespace fsqkd
