#include "fsqkd/security.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "fsqkd/kv_text.hpp"

namespace fsqkd {
namespace {

constexpr double kGridStep = 1e-3;
constexpr double kRootTol = 1e-10;

template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
  // f(lo) and f(hi) have opposite signs; returns the crossing.
  const bool lo_pos = f(lo) > 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) > 0.0) == lo_pos) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

template <class F>
double golden_max(F&& f, double a, double b, double tol = 1e-9) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Grid scan then golden refinement around the best grid point, over (0, 1).
template <class F>
double argmax_mu(F&& f) {
  double best_mu = kGridStep;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < 1000; ++i) {
    const double mu = i * kGridStep;
    const double v = f(mu);
    if (v > best) {
      best = v;
      best_mu = mu;
    }
  }
  return golden_max(f, std::max(best_mu - kGridStep, 1e-9), std::min(best_mu + kGridStep, 1.0 - 1e-9));
}

}  // namespace

double asymptotic_ber(double mu, double x, const ReceiverParams& rx) {
  if (std::isinf(x)) return 0.0;
  if (!(mu > 0.0) || !(x > 0.0)) return 0.5;
  return std::min(0.5, receiver_factor_d(rx) / (mu * x));
}

double secret_rate_margin(double mu, double x, const ReceiverParams& rx, const SecrecyPolicy& policy) {
  const double eps = asymptotic_ber(mu, x, rx);
  return collision_entropy_rate(mu, eps) - policy.ec_overhead * binary_entropy(eps);
}

double asymptotic_secret_rate(double mu, double x, const ReceiverParams& rx, const SecrecyPolicy& policy) {
  return std::max(0.0, secret_rate_margin(mu, x, rx, policy));
}

double secrecy_efficiency_over_eta(double mu, double x, const ReceiverParams& rx, const SecrecyPolicy& policy) {
  return mu * rx.product() * asymptotic_secret_rate(mu, x, rx, policy);
}

YieldRegion yield_region(double x, const ReceiverParams& rx, const SecrecyPolicy& policy) {
  auto margin = [&](double mu) { return secret_rate_margin(mu, x, rx, policy); };
  YieldRegion region;
  int first = -1, last = -1;
  double peak = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < 1000; ++i) {
    const double v = margin(i * kGridStep);
    peak = std::max(peak, v);
    if (v > 0.0) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) {
    region.peak_rate = margin(argmax_mu(margin));
    region.empty = !(region.peak_rate > 0.0);
    if (region.empty) return region;
    // Window narrower than the grid: bracket around the peak.
    const double top = argmax_mu(margin);
    region.mu_min = bisect(margin, std::max(top - kGridStep, 0.0), top, kRootTol);
    region.mu_max = bisect(margin, top, std::min(top + kGridStep, 1.0), kRootTol);
    region.mu_opt = top;
    return region;
  }
  region.empty = false;
  region.mu_min = bisect(margin, (first - 1) * kGridStep, first * kGridStep, kRootTol);
  region.mu_max = bisect(margin, last * kGridStep, (last + 1) * kGridStep, kRootTol);
  auto efficiency = [&](double mu) { return mu * margin(mu); };
  region.mu_opt = argmax_mu(efficiency);
  region.peak_rate = std::max(peak, margin(argmax_mu(margin)));
  return region;
}

YieldThreshold min_channel_parameter(const ReceiverParams& rx, const SecrecyPolicy& policy) {
  auto best = [&](double log_x) {
    const double x = std::exp(log_x);
    auto margin = [&](double mu) { return secret_rate_margin(mu, x, rx, policy); };
    return margin(argmax_mu(margin));
  };
  double lo = std::log(1e-6), hi = std::log(1.0);
  if (best(lo) > 0.0 || best(hi) <= 0.0) throw std::runtime_error("threshold outside the search bracket");
  const double log_x = bisect(best, lo, hi, 1e-10);
  YieldThreshold t;
  t.channel_parameter_min = std::exp(log_x);
  auto margin = [&](double mu) { return secret_rate_margin(mu, t.channel_parameter_min, rx, policy); };
  t.mu_star = argmax_mu(margin);
  t.eps_star = asymptotic_ber(t.mu_star, t.channel_parameter_min, rx);
  return t;
}

AttackFlags attack_flags(double mu, double eta) {
  AttackFlags f;
  f.usd_safe = !(mu * mu / 32.0 > eta);
  f.pns_safe = !(mu > 2.0 * eta);
  return f;
}

double usd_loss_tolerance_db(double mu) {
  if (!(mu > 0.0)) throw std::domain_error("mu must be positive");
  return -10.0 * std::log10(mu * mu / 32.0);
}

ChannelParams scale_channel(const ChannelParams& base, double range_km, const ScalingModel& model) {
  if (!(range_km > 0.0)) throw std::domain_error("range must be positive");
  const double ratio = range_km / model.reference_range_km;
  ChannelParams out = base;
  out.eta_trans = std::pow(base.eta_trans, ratio);
  out.eta_geo = std::min(1.0, base.eta_geo / (ratio * ratio));
  return out;
}

double max_range_km(const ChannelParams& base, double threshold, const ScalingModel& model) {
  if (base.background_c == 0.0) return std::numeric_limits<double>::infinity();
  auto excess = [&](double r) { return channel_parameter(scale_channel(base, r, model)) - threshold; };
  double lo = 1e-3;
  if (!(excess(lo) > 0.0)) return 0.0;
  double hi = model.reference_range_km;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e7) return std::numeric_limits<double>::infinity();
  }
  return bisect(excess, lo, hi, 1e-9 * hi);
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points == 0) return {};
  if (points == 1) return {lo};
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return g;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw std::domain_error("log grid bounds must be positive");
  auto g = linear_grid(std::log(lo), std::log(hi), points);
  for (auto& v : g) v = std::exp(v);
  if (!g.empty()) {
    g.front() = lo;
    g.back() = points > 1 ? hi : lo;
  }
  return g;
}

std::vector<SurfacePoint> scaled_secrecy_surface(const SurfaceSpec& spec, const ReceiverParams& rx,
                                                 const SecrecyPolicy& policy) {
  std::vector<SurfacePoint> out;
  out.reserve(spec.mu.size() * spec.channel_parameter.size());
  for (double x : spec.channel_parameter) {
    if (!(x > 0.0)) throw std::domain_error("channel parameter grid must be positive");
    for (double mu : spec.mu) {
      if (!(mu > 0.0)) throw std::domain_error("mu grid must be positive");
      SurfacePoint p;
      p.mu = mu;
      p.channel_parameter = x;
      p.epsilon = asymptotic_ber(mu, x, rx);
      p.p_sif_to_secret = asymptotic_secret_rate(mu, x, rx, policy);
      p.p_secret_over_eta_opt = mu * rx.product() * p.p_sif_to_secret;
      const auto flags = attack_flags(mu, x * spec.reference_c);
      p.usd_safe = flags.usd_safe;
      p.pns_safe = flags.pns_safe;
      out.push_back(p);
    }
  }
  return out;
}

void write_surface_csv(std::ostream& out, const std::vector<SurfacePoint>& points) {
  out << "mu,eta_opt_over_c,epsilon,p_sif_to_secret,p_secret_over_eta_opt,usd_safe,pns_safe\n";
  for (const auto& p : points) {
    out << format_double(p.mu) << ',' << format_double(p.channel_parameter) << ','
        << format_double(p.epsilon) << ',' << format_double(p.p_sif_to_secret) << ','
        << format_double(p.p_secret_over_eta_opt) << ',' << (p.usd_safe ? 1 : 0) << ','
        << (p.pns_safe ? 1 : 0) << '\n';
  }
}

}  // namespace fsqkd
