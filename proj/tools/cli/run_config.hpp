#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "fsqkd/endpoint.hpp"
#include "fsqkd/kv_text.hpp"
#include "fsqkd/link_model.hpp"
#include "fsqkd/presets.hpp"
#include "fsqkd/privacy.hpp"

namespace fsqkd::cli {

enum class TransportKind { Loopback, Tcp };

struct RunConfig {
  std::string preset = "reduced_daylight";
  LinkParams link;
  RunJitter jitter;
  std::uint64_t seed = 1;
  std::size_t runs = 1;
  TransportKind transport = TransportKind::Loopback;
  std::string listen;   // host:port
  std::string connect;  // host:port
  Side role = Side::Alice;
  SecrecyPolicy policy;
  std::filesystem::path out_dir;
  std::filesystem::path transcript;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// Settings use the config-file key names (preset, mu, eta_geo, c, runs, seed,
// transport, listen, connect, role, policy_s, out_dir, ...). Unknown keys
// are rejected. Throws std::invalid_argument on bad values.
RunConfig resolve_run_config(const KvSection& settings);

// Config-file keys understood by resolve_run_config.
const std::vector<std::string>& run_config_keys();

// Parameters of run i after per-run jitter (mu normal, eta_geo and C
// mean-preserving log-normal). Deterministic in (seed, i).
LinkParams link_for_run(const RunConfig& cfg, std::size_t run);
std::uint64_t seed_for_run(const RunConfig& cfg, std::size_t run);

struct HostPort {
  std::string host;
  std::uint16_t port = 0;
};
HostPort parse_host_port(const std::string& text);

}  // namespace fsqkd::cli
