#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fsqkd/link_model.hpp"
#include "fsqkd/privacy.hpp"
#include "run_config.hpp"

namespace fsqkd::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kTransport = 2;
inline constexpr int kAbort = 3;
inline constexpr int kKeyCheck = 4;
inline constexpr int kRandomness = 5;  // keytest found a failing test
}  // namespace exit_code

int cmd_session(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_calibrate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

struct SurfaceOptions {
  double mu_min = 0.01;
  double mu_max = 0.99;
  std::size_t mu_points = 99;
  double x_min = 1e-4;
  double x_max = 0.1;
  std::size_t x_points = 61;
  double c_ref = 5.0;
  ReceiverParams rx;
  SecrecyPolicy policy;
  std::filesystem::path out_dir;  // empty: surface CSV on stdout
};
int cmd_surface(const SurfaceOptions& opt, std::ostream& out, std::ostream& err);

struct KeytestOptions {
  std::filesystem::path key;
  std::size_t max_chunk_failures = 0;
};
int cmd_keytest(const KeytestOptions& opt, std::ostream& out, std::ostream& err);

int cmd_otp(const std::string& mode, const std::filesystem::path& key, const std::filesystem::path& in,
            const std::filesystem::path& out_path, std::ostream& out, std::ostream& err);

}  // namespace fsqkd::cli
