#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include "fsqkd/randcheck.hpp"
#include "fsqkd/security.hpp"
#include "fsqkd/session.hpp"
#include "fsqkd/transport.hpp"
#include "key_file.hpp"
#include "otp.hpp"

namespace fsqkd::cli {
namespace {

struct Stat {
  double mean = 0;
  double sd = 0;
};

Stat stat_of(const std::vector<double>& v) {
  Stat s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

void set_stat(KvSection& s, const std::string& key, const std::vector<double>& v) {
  const auto st = stat_of(v);
  s.set(key + "_mean", format_double(st.mean));
  s.set(key + "_sd", format_double(st.sd));
}

KvSection aggregate(const std::vector<SessionReport>& reports, std::size_t aborted) {
  KvSection s;
  s.name = "aggregate";
  std::vector<double> mu, eta, x, psif, eps, psec;
  std::uint64_t sifted = 0, secret = 0, zero = 0, failed = 0, pns = 0, usd = 0;
  for (const auto& r : reports) {
    mu.push_back(r.mu);
    eta.push_back(r.eta_opt);
    x.push_back(r.channel_parameter);
    psif.push_back(r.p_sif);
    eps.push_back(r.epsilon);
    psec.push_back(r.p_secret);
    sifted += r.n_sifted;
    secret += r.final_length;
    zero += r.zero_yield;
    failed += r.key_check == KeyCheckStatus::Failed;
    pns += r.pns_safe;
    usd += r.usd_safe;
  }
  s.set("sessions", std::to_string(reports.size()));
  s.set("aborted", std::to_string(aborted));
  set_stat(s, "mu", mu);
  set_stat(s, "eta_opt", eta);
  set_stat(s, "eta_opt_over_c", x);
  set_stat(s, "p_sif", psif);
  set_stat(s, "epsilon", eps);
  set_stat(s, "p_secret", psec);
  s.set("sifted_bits", std::to_string(sifted));
  s.set("secret_bits", std::to_string(secret));
  s.set("zero_yield", std::to_string(zero));
  s.set("key_check_failed", std::to_string(failed));
  s.set("usd_safe", std::to_string(usd));
  s.set("pns_safe", std::to_string(pns));
  return s;
}

void emit(std::ostream& out, const KvSection& s) {
  KvDocument d;
  d.sections.push_back(s);
  out << to_kv(d);
}

struct RunOutcome {
  std::optional<SessionReport> report;
  BitString alice, bob;
  std::string error;
  Transcript transcript;
};

std::vector<RunOutcome> run_loopback(const RunConfig& cfg) {
  std::vector<RunOutcome> results(cfg.runs);
  std::atomic<std::size_t> next{0};
  const bool keep_transcript = !cfg.transcript.empty();
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.runs; i = next++) {
      SessionConfig sc{link_for_run(cfg, i), seed_for_run(cfg, i), cfg.policy};
      try {
        auto r = run_session(sc, keep_transcript ? &results[i].transcript : nullptr);
        results[i].report = r.report;
        results[i].alice = std::move(r.alice_key);
        results[i].bob = std::move(r.bob_key);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  unsigned n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, cfg.runs));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

std::vector<RunOutcome> run_tcp(const RunConfig& cfg) {
  std::unique_ptr<TcpListener> listener;
  std::unique_ptr<TcpTransport> link;
  if (!cfg.listen.empty()) {
    const auto hp = parse_host_port(cfg.listen);
    listener = std::make_unique<TcpListener>(hp.host, hp.port);
    link = listener->accept();
  } else {
    const auto hp = parse_host_port(cfg.connect);
    link = TcpTransport::connect(hp.host, hp.port, 30000);
  }
  std::vector<RunOutcome> results(cfg.runs);
  for (std::size_t i = 0; i < cfg.runs; ++i) {
    SessionConfig sc{link_for_run(cfg, i), seed_for_run(cfg, i), cfg.policy};
    // Transport errors propagate; a protocol abort ends the whole exchange too,
    // since the peer stops after it.
    auto r = run_session_endpoint(sc, cfg.role, *link, cfg.transcript.empty() ? nullptr : &results[i].transcript);
    results[i].report = r.report;
    (cfg.role == Side::Alice ? results[i].alice : results[i].bob) = std::move(r.key);
  }
  return results;
}

}  // namespace

int cmd_session(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<RunOutcome> results;
  try {
    results = cfg.transport == TransportKind::Tcp ? run_tcp(cfg) : run_loopback(cfg);
  } catch (const TransportError& e) {
    err << "transport error: " << e.what() << '\n';
    return exit_code::kTransport;
  } catch (const SessionError& e) {
    err << e.what() << '\n';
    return exit_code::kAbort;
  }

  std::vector<SessionReport> reports;
  std::size_t aborted = 0;
  BitString alice_key, bob_key;
  std::ostringstream session_text;
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& r = results[i];
    if (!r.report) {
      ++aborted;
      err << "run " << i << ": " << r.error << '\n';
      continue;
    }
    emit(session_text, r.report->to_section("session." + std::to_string(i)));
    session_text << '\n';
    reports.push_back(*r.report);
    alice_key.append(r.alice);
    bob_key.append(r.bob);
  }
  const auto agg = aggregate(reports, aborted);

  if (cfg.out_dir.empty()) {
    out << session_text.str();
  } else {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream(cfg.out_dir / "sessions.txt") << session_text.str();
    std::ofstream(cfg.out_dir / "aggregate.txt") << [&] {
      std::ostringstream s;
      emit(s, agg);
      return s.str();
    }();
    auto write_key = [&](const char* side, const BitString& bits) {
      KeyFile k;
      k.header.set("format", "fsqkd-key");
      k.header.set("side", side);
      k.header.set("preset", cfg.preset);
      k.header.set("seed", std::to_string(cfg.seed));
      k.header.set("runs", std::to_string(cfg.runs));
      k.bits = bits;
      write_key_file(cfg.out_dir / (std::string(side) + ".key"), k);
    };
    if (cfg.transport == TransportKind::Loopback || cfg.role == Side::Alice) write_key("alice", alice_key);
    if (cfg.transport == TransportKind::Loopback || cfg.role == Side::Bob) write_key("bob", bob_key);
  }
  if (!cfg.transcript.empty()) {
    std::ofstream t(cfg.transcript, std::ios::binary | std::ios::trunc);
    for (const auto& r : results) r.transcript.write(t);
  }
  emit(out, agg);

  if (aborted) return exit_code::kAbort;
  const bool check_failed = std::any_of(reports.begin(), reports.end(),
                                        [](const auto& r) { return r.key_check == KeyCheckStatus::Failed; });
  return check_failed ? exit_code::kKeyCheck : exit_code::kOk;
}

int cmd_calibrate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  std::vector<double> estimates;
  static constexpr const char* kDet[4] = {"H", "V", "P45", "M45"};
  for (std::size_t i = 0; i < cfg.runs; ++i) {
    auto lp = link_for_run(cfg, i);
    lp.tx.mu = 0.0;
    const auto outcome = simulate_transmission(lp, seed_for_run(cfg, i));
    const auto cal = empirical_background_c(outcome);
    KvSection s;
    s.name = "calibration." + std::to_string(i);
    s.set("c_true", format_double(lp.ch.background_c));
    for (int d = 0; d < 4; ++d) {
      s.set(std::string("detections_") + kDet[d], std::to_string(cal.detections[d]));
      s.set(std::string("sifted_errors_") + kDet[d], std::to_string(cal.sifted_errors[d]));
    }
    s.set("c_estimate", format_double(cal.c_estimate));
    emit(out, s);
    out << '\n';
    estimates.push_back(cal.c_estimate);
  }
  KvSection agg;
  agg.name = "aggregate";
  agg.set("runs", std::to_string(cfg.runs));
  set_stat(agg, "c_estimate", estimates);
  emit(out, agg);
  return exit_code::kOk;
}

int cmd_surface(const SurfaceOptions& opt, std::ostream& out, std::ostream&) {
  SurfaceSpec spec;
  spec.mu = linear_grid(opt.mu_min, opt.mu_max, opt.mu_points);
  spec.channel_parameter = log_grid(opt.x_min, opt.x_max, opt.x_points);
  spec.reference_c = opt.c_ref;
  const auto points = scaled_secrecy_surface(spec, opt.rx, opt.policy);
  const auto threshold = min_channel_parameter(opt.rx, opt.policy);

  if (opt.out_dir.empty()) {
    write_surface_csv(out, points);
    return exit_code::kOk;
  }
  std::filesystem::create_directories(opt.out_dir);
  {
    std::ofstream f(opt.out_dir / "surface.csv");
    write_surface_csv(f, points);
  }
  {
    std::ofstream f(opt.out_dir / "yield_region.csv");
    f << "eta_opt_over_c,empty,mu_min,mu_opt,mu_max\n";
    for (double x : spec.channel_parameter) {
      const auto y = yield_region(x, opt.rx, opt.policy);
      f << format_double(x) << ',' << (y.empty ? 1 : 0) << ',' << format_double(y.mu_min) << ','
        << format_double(y.mu_opt) << ',' << format_double(y.mu_max) << '\n';
    }
  }
  KvSection s;
  s.name = "threshold";
  s.set("eta_opt_over_c_min", format_double(threshold.channel_parameter_min));
  s.set("mu_star", format_double(threshold.mu_star));
  s.set("eps_star", format_double(threshold.eps_star));
  emit(out, s);
  return exit_code::kOk;
}

int cmd_keytest(const KeytestOptions& opt, std::ostream& out, std::ostream& err) {
  const auto key = read_key_file(opt.key);
  const auto& bits = key.bits;
  constexpr std::size_t kChunk = 20000;
  constexpr unsigned kL = 5;
  const std::size_t maurer_min = ((std::size_t{10} << kL) + (std::size_t{100} << kL)) * kL;
  if (bits.size() < kChunk) {
    err << "key holds " << bits.size() << " bits; FIPS 140-2 needs at least " << kChunk
        << " bits, Maurer (L=5) needs at least " << maurer_min << " bits\n";
    return exit_code::kUsage;
  }
  std::size_t failures = 0;
  const std::size_t chunks = bits.size() / kChunk;
  for (std::size_t c = 0; c < chunks; ++c) {
    const auto r = fips_140_2(bits.slice(c * kChunk, kChunk));
    failures += !r.pass;
    emit(out, to_section(r, "fips." + std::to_string(c)));
    out << '\n';
  }
  bool maurer_ok = true;
  if (bits.size() >= maurer_min) {
    const auto m = maurer_universal(bits, kL);
    maurer_ok = m.pass;
    emit(out, to_section(m, "maurer"));
    out << '\n';
  } else {
    err << "maurer skipped: needs at least " << maurer_min << " bits\n";
  }
  const bool pass = failures <= opt.max_chunk_failures && maurer_ok;
  KvSection s;
  s.name = "keytest";
  s.set("bits", std::to_string(bits.size()));
  s.set("fips_chunks", std::to_string(chunks));
  s.set("fips_failures", std::to_string(failures));
  s.set("unused_tail_bits", std::to_string(bits.size() - chunks * kChunk));
  s.set("maurer", bits.size() >= maurer_min ? (maurer_ok ? "pass" : "fail") : "skipped");
  s.set("overall", pass ? "pass" : "fail");
  emit(out, s);
  return pass ? exit_code::kOk : exit_code::kRandomness;
}

int cmd_otp(const std::string& mode, const std::filesystem::path& key, const std::filesystem::path& in,
            const std::filesystem::path& out_path, std::ostream& out, std::ostream& err) {
  try {
    if (mode == "encrypt") {
      otp_encrypt(key, in, out_path);
    } else if (mode == "decrypt") {
      otp_decrypt(key, in, out_path);
    } else {
      err << "otp mode must be encrypt or decrypt\n";
      return exit_code::kUsage;
    }
  } catch (const OtpError& e) {
    err << "refused: " << e.what() << '\n';
    return exit_code::kUsage;
  }
  out << mode << "ed " << in.string() << " -> " << out_path.string() << '\n';
  return exit_code::kOk;
}

}  // namespace fsqkd::cli
