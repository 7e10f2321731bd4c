#pragma once

#include <iosfwd>
#include <vector>

#include "fsqkd/link_model.hpp"
#include "fsqkd/privacy.hpp"

namespace fsqkd {

/// eps = D / (mu x), clamped to 0.5. x = eta_opt / C.
double asymptotic_ber(double mu, double channel_parameter, const ReceiverParams& rx);

/// R(mu, eps) - ec_overhead h(eps) without the floor at zero.
double secret_rate_margin(double mu, double channel_parameter, const ReceiverParams& rx,
                          const SecrecyPolicy& policy);

/// Large-n secret bits per sifted bit: max(0, secret_rate_margin).
double asymptotic_secret_rate(double mu, double channel_parameter, const ReceiverParams& rx,
                              const SecrecyPolicy& policy);

/// Secret bits per transmitted bit over eta_opt, using the linearized sift
/// probability mu * eta_rec eta_fil eta_bb84 eta_det.
double secrecy_efficiency_over_eta(double mu, double channel_parameter, const ReceiverParams& rx,
                                   const SecrecyPolicy& policy);

struct YieldRegion {
  bool empty = true;
  double mu_min = 0;
  double mu_max = 0;
  double mu_opt = 0;     ///< maximizer of the secrecy efficiency mu * rate
  double peak_rate = 0;  ///< largest margin over mu (may be negative when empty)
};

/// Window of mu in (0, 1) with positive secret yield. Grid bracketing at
/// 1e-3, then bisection to 1e-6.
YieldRegion yield_region(double channel_parameter, const ReceiverParams& rx, const SecrecyPolicy& policy);

struct YieldThreshold {
  double channel_parameter_min = 0;
  double mu_star = 0;
  double eps_star = 0;
};

/// Smallest eta_opt/C for which some mu gives positive yield.
YieldThreshold min_channel_parameter(const ReceiverParams& rx, const SecrecyPolicy& policy);

struct AttackFlags {
  bool usd_safe = true;
  bool pns_safe = true;
};

/// usd unsafe when mu^2/32 > eta_opt, pns unsafe when mu > 2 eta_opt.
AttackFlags attack_flags(double mu, double eta_opt);

/// Largest tolerable channel loss in dB before the USD attack opens:
/// -10 log10(mu^2/32).
double usd_loss_tolerance_db(double mu);

struct ScalingModel {
  double reference_range_km = 9.81;
};

/// eta_trans^(R/R0), eta_geo (R0/R)^2 capped at 1; C unchanged.
ChannelParams scale_channel(const ChannelParams& base, double target_range_km,
                            const ScalingModel& model = {});

/// Range where eta_opt/C falls to `threshold` under the scaling model.
/// Returns 0 when the base channel is already below threshold.
double max_range_km(const ChannelParams& base, double threshold, const ScalingModel& model = {});

struct SurfacePoint {
  double mu = 0;
  double channel_parameter = 0;
  double epsilon = 0;
  double p_sif_to_secret = 0;
  double p_secret_over_eta_opt = 0;
  bool usd_safe = true;
  bool pns_safe = true;
};

struct SurfaceSpec {
  std::vector<double> mu;
  std::vector<double> channel_parameter;
  double reference_c = 5.0;  ///< C used to turn x back into eta_opt for the attack flags
};

/// Evenly spaced grid from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t points);
/// Logarithmically spaced grid from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t points);

std::vector<SurfacePoint> scaled_secrecy_surface(const SurfaceSpec& spec, const ReceiverParams& rx,
                                                 const SecrecyPolicy& policy);

void write_surface_csv(std::ostream& out, const std::vector<SurfacePoint>& points);

}  // namespace fsqkd
