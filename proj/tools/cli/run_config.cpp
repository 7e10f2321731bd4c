#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "fsqkd/rng.hpp"

namespace fsqkd::cli {

const std::vector<std::string>& run_config_keys() {
  static const std::vector<std::string> keys = {
      "preset", "mu", "eta_geo", "eta_trans", "c", "misalignment", "clock_rate",
      "mu_sigma", "eta_geo_sigma", "c_sigma", "runs", "seed", "transport", "listen",
      "connect", "role", "policy_s", "ec_overhead", "keycheck_bits", "out_dir",
      "transcript", "threads"};
  return keys;
}

RunConfig resolve_run_config(const KvSection& s) {
  const auto& keys = run_config_keys();
  for (const auto& [k, v] : s.entries) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw std::invalid_argument("unknown setting: " + k);
    }
  }
  RunConfig cfg;
  if (auto p = s.find("preset")) cfg.preset = *p;
  const auto& preset = find_preset(builtin_presets(), cfg.preset);
  cfg.link = preset.link;
  cfg.jitter = preset.jitter;

  cfg.link.tx.mu = s.get_double("mu", cfg.link.tx.mu);
  cfg.link.ch.eta_geo = s.get_double("eta_geo", cfg.link.ch.eta_geo);
  cfg.link.ch.eta_trans = s.get_double("eta_trans", cfg.link.ch.eta_trans);
  cfg.link.ch.background_c = s.get_double("c", cfg.link.ch.background_c);
  cfg.link.tx.misalignment_error = s.get_double("misalignment", cfg.link.tx.misalignment_error);
  cfg.link.tx.clock_rate_hz = s.get_double("clock_rate", cfg.link.tx.clock_rate_hz);
  cfg.jitter.mu_sigma = s.get_double("mu_sigma", cfg.jitter.mu_sigma);
  cfg.jitter.eta_geo_sigma = s.get_double("eta_geo_sigma", cfg.jitter.eta_geo_sigma);
  cfg.jitter.c_sigma = s.get_double("c_sigma", cfg.jitter.c_sigma);
  if (cfg.jitter.mu_sigma < 0 || cfg.jitter.eta_geo_sigma < 0 || cfg.jitter.c_sigma < 0) {
    throw std::invalid_argument("jitter sigmas must be >= 0");
  }

  if (s.find("runs")) cfg.runs = s.get_u64("runs");
  if (cfg.runs == 0) throw std::invalid_argument("runs must be positive");
  if (s.find("seed")) cfg.seed = s.get_u64("seed");
  if (s.find("threads")) cfg.threads = static_cast<unsigned>(s.get_u64("threads"));

  if (auto t = s.find("transport")) {
    if (*t == "loopback") {
      cfg.transport = TransportKind::Loopback;
    } else if (*t == "tcp") {
      cfg.transport = TransportKind::Tcp;
    } else {
      throw std::invalid_argument("transport must be loopback or tcp");
    }
  }
  if (auto v = s.find("listen")) cfg.listen = *v;
  if (auto v = s.find("connect")) cfg.connect = *v;
  if (auto r = s.find("role")) {
    if (*r == "alice") {
      cfg.role = Side::Alice;
    } else if (*r == "bob") {
      cfg.role = Side::Bob;
    } else {
      throw std::invalid_argument("role must be alice or bob");
    }
  }
  if (cfg.transport == TransportKind::Tcp && cfg.listen.empty() == cfg.connect.empty()) {
    throw std::invalid_argument("tcp transport needs exactly one of listen or connect");
  }

  cfg.policy.safety_s = s.get_double("policy_s", cfg.policy.safety_s);
  cfg.policy.ec_overhead = s.get_double("ec_overhead", cfg.policy.ec_overhead);
  if (s.find("keycheck_bits")) cfg.policy.keycheck_bits = static_cast<std::uint32_t>(s.get_u64("keycheck_bits"));
  cfg.policy.validate();
  if (auto v = s.find("out_dir")) cfg.out_dir = *v;
  if (auto v = s.find("transcript")) cfg.transcript = *v;
  cfg.link.validate();
  return cfg;
}

std::uint64_t seed_for_run(const RunConfig& cfg, std::size_t run) {
  return derive_seed(cfg.seed, 0x1000 + run);
}

LinkParams link_for_run(const RunConfig& cfg, std::size_t run) {
  LinkParams lp = cfg.link;
  const auto& j = cfg.jitter;
  if (j.mu_sigma == 0 && j.eta_geo_sigma == 0 && j.c_sigma == 0) return lp;
  Rng rng(derive_seed(seed_for_run(cfg, run), streams::kTurbulence));
  const double z_mu = rng.normal(0, 1);
  const double z_geo = rng.normal(0, 1);
  const double z_c = rng.normal(0, 1);
  if (j.mu_sigma > 0 && lp.tx.mu > 0) lp.tx.mu = std::clamp(lp.tx.mu + j.mu_sigma * z_mu, 0.01, 0.95);
  auto lognormal = [](double mean, double sigma, double z) {
    return mean * std::exp(sigma * z - 0.5 * sigma * sigma);
  };
  if (j.eta_geo_sigma > 0) lp.ch.eta_geo = std::min(1.0, lognormal(lp.ch.eta_geo, j.eta_geo_sigma, z_geo));
  // C spread keeps the mean of 1/C, so the mean of eta_opt/C stays put.
  if (j.c_sigma > 0) lp.ch.background_c = 1.0 / lognormal(1.0 / lp.ch.background_c, j.c_sigma, z_c);
  return lp;
}

HostPort parse_host_port(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("expected host:port, got " + text);
  HostPort hp;
  hp.host = text.substr(0, colon);
  if (hp.host.empty()) hp.host = "127.0.0.1";
  unsigned port = 0;
  const auto* b = text.data() + colon + 1;
  const auto* e = text.data() + text.size();
  auto [p, ec] = std::from_chars(b, e, port);
  if (ec != std::errc{} || p != e || port > 65535) throw std::invalid_argument("bad port in " + text);
  hp.port = static_cast<std::uint16_t>(port);
  return hp;
}

}  // namespace fsqkd::cli
