#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "commands.hpp"
#include "fsqkd/kv_text.hpp"

namespace {

using namespace fsqkd;
using namespace fsqkd::cli;

struct RunFlags {
  std::map<std::string, std::string> values;
  std::string config;
};

// Flag name -> config key.
const std::vector<std::pair<std::string, std::string>> kRunFlags = {
    {"--preset", "preset"},       {"--mu", "mu"},
    {"--eta-geo", "eta_geo"},     {"--eta-trans", "eta_trans"},
    {"--c", "c"},                 {"--misalignment", "misalignment"},
    {"--mu-sigma", "mu_sigma"},   {"--eta-geo-sigma", "eta_geo_sigma"},
    {"--c-sigma", "c_sigma"},     {"--runs", "runs"},
    {"--seed", "seed"},           {"--transport", "transport"},
    {"--listen", "listen"},       {"--connect", "connect"},
    {"--role", "role"},           {"--policy-s", "policy_s"},
    {"--out-dir", "out_dir"},     {"--transcript", "transcript"},
    {"--threads", "threads"},
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  for (const auto& [flag, key] : kRunFlags) app->add_option(flag, f.values[key]);
  app->add_option("--config", f.config, "key = value file mirroring the flags");
}

RunConfig resolve(CLI::App* app, RunFlags& f) {
  KvSection merged;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw std::invalid_argument("cannot open config " + f.config);
    std::stringstream ss;
    ss << in.rdbuf();
    for (const auto& sec : parse_kv(ss.str()).sections) {
      for (const auto& [k, v] : sec.entries) merged.set(k, v);
    }
  }
  for (const auto& [flag, key] : kRunFlags) {
    if (app->count(flag)) merged.set(key, f.values[key]);
  }
  return resolve_run_config(merged);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-space BB84 key distribution simulator"};
  app.require_subcommand(1);

  RunFlags session_flags, calibrate_flags;
  auto* session = app.add_subcommand("session", "run 1-s key sessions and write reports and keys");
  add_run_flags(session, session_flags);
  auto* calibrate = app.add_subcommand("calibrate", "estimate C from mu = 0 transmissions");
  add_run_flags(calibrate, calibrate_flags);

  SurfaceOptions surf;
  auto* surface = app.add_subcommand("surface", "secrecy efficiency surface over mu and eta_opt/C");
  surface->add_option("--mu-min", surf.mu_min);
  surface->add_option("--mu-max", surf.mu_max);
  surface->add_option("--mu-points", surf.mu_points);
  surface->add_option("--x-min", surf.x_min, "smallest eta_opt/C");
  surface->add_option("--x-max", surf.x_max);
  surface->add_option("--x-points", surf.x_points);
  surface->add_option("--c-ref", surf.c_ref, "C used for the attack flag columns");
  surface->add_option("--policy-s", surf.policy.safety_s);
  surface->add_option("--out-dir", surf.out_dir);

  KeytestOptions kt;
  auto* keytest = app.add_subcommand("keytest", "FIPS 140-2 and Maurer tests on a key file");
  keytest->add_option("key", kt.key)->required();
  keytest->add_option("--max-chunk-failures", kt.max_chunk_failures);

  std::string otp_mode;
  std::string otp_key, otp_in, otp_out;
  auto* otp = app.add_subcommand("otp", "one-time-pad encrypt or decrypt with a key file");
  otp->add_option("mode", otp_mode)->required()->check(CLI::IsMember({"encrypt", "decrypt"}));
  otp->add_option("--key", otp_key)->required();
  otp->add_option("--in", otp_in)->required();
  otp->add_option("--out", otp_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code::kUsage;
  }

  try {
    if (*session) return cmd_session(resolve(session, session_flags), std::cout, std::cerr);
    if (*calibrate) return cmd_calibrate(resolve(calibrate, calibrate_flags), std::cout, std::cerr);
    if (*surface) return cmd_surface(surf, std::cout, std::cerr);
    if (*keytest) return cmd_keytest(kt, std::cout, std::cerr);
    if (*otp) return cmd_otp(otp_mode, otp_key, otp_in, otp_out, std::cout, std::cerr);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  }
  return exit_code::kUsage;
}
