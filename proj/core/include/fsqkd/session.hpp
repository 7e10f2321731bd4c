#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "fsqkd/endpoint.hpp"
#include "fsqkd/kv_text.hpp"
#include "fsqkd/link_model.hpp"
#include "fsqkd/privacy.hpp"
#include "fsqkd/quantum_sim.hpp"
#include "fsqkd/reconcile.hpp"
#include "fsqkd/sift.hpp"

namespace fsqkd {

struct SessionConfig {
  LinkParams link;
  std::uint64_t seed = 1;
  SecrecyPolicy policy;

  std::uint64_t session_id() const;
  /// First-round error estimate handed to reconciliation.
  double epsilon_estimate() const;
};

enum class KeyCheckStatus : std::uint8_t { Skipped, Passed, Failed };
std::string_view to_string(KeyCheckStatus s);

/// Per-transmission figures of merit. Every field is computed from
/// information both endpoints hold, so Alice's and Bob's reports agree.
struct SessionReport {
  std::uint64_t seed = 0;
  std::uint64_t session_id = 0;
  double mu = 0;
  double eta_opt = 0;
  double channel_parameter = 0;

  std::uint64_t n_raw = 0;         ///< Bob's single detections
  std::uint64_t n_sifted = 0;
  std::uint64_t n_rectilinear = 0;
  std::uint64_t errors_corrected = 0;
  double epsilon = 0;              ///< errors_corrected / n_sifted
  std::uint64_t leak_bits = 0;
  std::uint32_t rounds = 0;
  std::uint64_t f_secret = 0;

  double p_sif = 0;
  double p_sif_to_secret = 0;
  double p_secret = 0;

  bool zero_yield = true;
  bool usd_safe = true;
  bool pns_safe = true;

  KeyCheckStatus key_check = KeyCheckStatus::Skipped;
  std::uint64_t final_length = 0;

  SecrecyBudget budget;

  KvSection to_section(std::string_view name = "session") const;
  std::string to_text() const;
  static SessionReport from_section(const KvSection& s);

  friend bool operator==(const SessionReport& a, const SessionReport& b) { return a.to_text() == b.to_text(); }
};

class SessionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Alice's endpoint: sift, reconcile (she picks shuffle seeds), privacy
/// amplification (she picks the PA seed and sends PA_SPEC), key check.
class AliceEndpoint final : public Endpoint {
 public:
  AliceEndpoint(SessionConfig config, const TransmissionOutcome& outcome);
  ~AliceEndpoint() override;

  const SessionReport& report() const { return report_; }
  const BitString& key() const { return key_; }

 protected:
  std::vector<Message> on_start() override { return {}; }
  std::vector<Message> on_message(const Message& m) override;
  bool complete() const override { return stage_ == Stage::Done; }

 private:
  enum class Stage { Sift, Reconcile, KeyCheck, Done };
  std::vector<Message> begin_reconcile();
  std::vector<Message> send_pa_spec();

  SessionConfig config_;
  const TransmissionOutcome& outcome_;
  Stage stage_ = Stage::Sift;
  SiftAlice sift_;
  std::unique_ptr<ReconcileAlice> reconcile_;
  std::unique_ptr<KeyCheckPhase> check_;
  ReconciledKey reconciled_;
  SessionReport report_;
  BitString key_;
};

class BobEndpoint final : public Endpoint {
 public:
  BobEndpoint(SessionConfig config, const TransmissionOutcome& outcome);
  ~BobEndpoint() override;

  const SessionReport& report() const { return report_; }
  const BitString& key() const { return key_; }

 protected:
  std::vector<Message> on_start() override { return sift_.start(); }
  std::vector<Message> on_message(const Message& m) override;
  bool complete() const override { return stage_ == Stage::Done; }

 private:
  enum class Stage { Sift, Reconcile, AwaitPaSpec, KeyCheck, Done };
  std::vector<Message> accept_pa_spec(const Message& m);

  SessionConfig config_;
  Stage stage_ = Stage::Sift;
  SiftBob sift_;
  std::unique_ptr<ReconcileBob> reconcile_;
  std::unique_ptr<KeyCheckPhase> check_;
  ReconciledKey reconciled_;
  SessionReport report_;
  BitString key_;
};

struct SessionResult {
  SessionReport report;
  BitString alice_key;  ///< verified secret key; empty on zero yield or failed check
  BitString bob_key;
};

/// Simulates one transmission and runs both endpoints in-process.
/// Throws SessionError when either side aborts.
SessionResult run_session(const SessionConfig& config, Transcript* transcript = nullptr);
SessionResult run_session(const SessionConfig& config, const TransmissionOutcome& outcome,
                          Transcript* transcript = nullptr);

struct EndpointResult {
  SessionReport report;
  BitString key;
};

/// Runs one side over a transport. Both processes simulate the same
/// (link, seed) and each uses only its own half of the outcome.
EndpointResult run_session_endpoint(const SessionConfig& config, Side side, Transport& transport,
                                    Transcript* transcript = nullptr);

}  // namespace fsqkd
