#include "fsqkd/session.hpp"

#include <algorithm>
#include <cmath>

#include "fsqkd/rng.hpp"
#include "fsqkd/security.hpp"

namespace fsqkd {

std::uint64_t SessionConfig::session_id() const { return derive_seed(seed, streams::kSessionId); }

double SessionConfig::epsilon_estimate() const {
  const double e = expected_ber(link).value + link.tx.misalignment_error;
  return std::min(e, 0.5);
}

std::string_view to_string(KeyCheckStatus s) {
  switch (s) {
    case KeyCheckStatus::Skipped: return "skipped";
    case KeyCheckStatus::Passed: return "passed";
    case KeyCheckStatus::Failed: return "failed";
  }
  return "?";
}

namespace {

void require_session_config(const SessionConfig& c) {
  c.link.validate();
  c.policy.validate();
  if (!(c.link.tx.mu > 0.0)) throw std::invalid_argument("a key session needs mu > 0");
}

std::array<std::uint64_t, 2> pa_seed_for(std::uint64_t seed) {
  Rng rng(derive_seed(seed, streams::kPrivacyAmplification));
  const auto hi = rng.next_u64();
  return {hi, rng.next_u64()};
}

double budget_epsilon(const ReconciledKey& r) { return std::min(r.epsilon_measured, 0.5); }

BudgetEcho echo_of(const SecrecyBudget& b, const ReconciledKey& r) {
  BudgetEcho e;
  e.n = static_cast<std::uint32_t>(b.n);
  e.ec_leak_bits = static_cast<std::uint32_t>(r.leak_bits);
  e.corrected = static_cast<std::uint32_t>(r.corrected);
  e.multi_photon_bits = b.multi_photon_bits;
  e.breidbart_bits = b.breidbart_bits;
  e.bias_bits = b.bias_bits;
  e.safety_bits = b.safety_bits;
  return e;
}

SessionReport make_report(const SessionConfig& c, std::size_t n_raw, std::size_t n_rect,
                          const ReconciledKey& r, const SecrecyBudget& budget, KeyCheckStatus check,
                          std::size_t final_length) {
  SessionReport rep;
  rep.seed = c.seed;
  rep.session_id = c.session_id();
  rep.mu = c.link.tx.mu;
  rep.eta_opt = eta_opt(c.link.ch);
  rep.channel_parameter = channel_parameter(c.link.ch);
  rep.n_raw = n_raw;
  rep.n_sifted = r.n();
  rep.n_rectilinear = n_rect;
  rep.errors_corrected = r.corrected;
  rep.epsilon = r.epsilon_measured;
  rep.leak_bits = r.leak_bits;
  rep.rounds = r.rounds;
  rep.f_secret = budget.f_secret;
  rep.p_sif = static_cast<double>(r.n()) / slots_per_transmission(c.link.tx);
  rep.p_sif_to_secret = r.n() ? static_cast<double>(budget.f_secret) / static_cast<double>(r.n()) : 0.0;
  rep.p_secret = budget.f_secret > 0 ? rep.p_sif * rep.p_sif_to_secret : 0.0;
  rep.zero_yield = budget.f_secret == 0;
  const auto flags = attack_flags(rep.mu, rep.eta_opt);
  rep.usd_safe = flags.usd_safe;
  rep.pns_safe = flags.pns_safe;
  rep.key_check = check;
  rep.final_length = final_length;
  rep.budget = budget;
  return rep;
}

}  // namespace

// ---------------------------------------------------------------------------

AliceEndpoint::AliceEndpoint(SessionConfig config, const TransmissionOutcome& outcome)
    : Endpoint(config.session_id()), config_(std::move(config)), outcome_(outcome), sift_(outcome_.pulses) {
  require_session_config(config_);
}

AliceEndpoint::~AliceEndpoint() = default;

std::vector<Message> AliceEndpoint::begin_reconcile() {
  const auto& sifted = sift_.key();
  reconcile_ = std::make_unique<ReconcileAlice>(sifted.bits, config_.epsilon_estimate(),
                                                derive_seed(config_.seed, streams::kShuffle));
  stage_ = Stage::Reconcile;
  auto out = reconcile_->start();
  if (reconcile_->done()) {
    auto more = send_pa_spec();
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

std::vector<Message> AliceEndpoint::send_pa_spec() {
  reconciled_ = reconcile_->result();
  const auto budget = secret_fraction(reconciled_.n(), config_.link.tx.mu, budget_epsilon(reconciled_),
                                      config_.policy, measure_bias(reconciled_.bits),
                                      static_cast<double>(reconciled_.leak_bits));
  PaSpec spec;
  spec.f_secret = static_cast<std::uint32_t>(budget.f_secret);
  spec.pa_seed = pa_seed_for(config_.seed);
  spec.echo = echo_of(budget, reconciled_);
  const auto n_rect = sift_.key().rectilinear;
  if (budget.f_secret == 0) {
    report_ = make_report(config_, sift_.raw_count(), n_rect, reconciled_, budget, KeyCheckStatus::Skipped, 0);
    stage_ = Stage::Done;
  } else {
    check_ = std::make_unique<KeyCheckPhase>(Side::Alice, extract(reconciled_.bits, budget.f_secret, spec.pa_seed),
                                             config_.policy.keycheck_bits);
    report_ = make_report(config_, sift_.raw_count(), n_rect, reconciled_, budget, KeyCheckStatus::Skipped, 0);
    stage_ = Stage::KeyCheck;
  }
  return {encode(spec)};
}

std::vector<Message> AliceEndpoint::on_message(const Message& m) {
  switch (stage_) {
    case Stage::Sift: {
      auto out = sift_.on_message(m);
      if (!sift_.done()) return out;
      auto more = begin_reconcile();
      out.insert(out.end(), more.begin(), more.end());
      return out;
    }
    case Stage::Reconcile: {
      auto out = reconcile_->on_message(m);
      if (!reconcile_->done()) return out;
      auto more = send_pa_spec();
      out.insert(out.end(), more.begin(), more.end());
      return out;
    }
    case Stage::KeyCheck: {
      auto out = check_->on_message(m);
      if (check_->done()) {
        key_ = check_->key();
        report_.key_check = check_->passed() ? KeyCheckStatus::Passed : KeyCheckStatus::Failed;
        report_.final_length = key_.size();
        stage_ = Stage::Done;
      }
      return out;
    }
    case Stage::Done: break;
  }
  throw ProtocolError("session already finished");
}

// ---------------------------------------------------------------------------

BobEndpoint::BobEndpoint(SessionConfig config, const TransmissionOutcome& outcome)
    : Endpoint(config.session_id()), config_(std::move(config)), sift_(outcome.detections) {
  require_session_config(config_);
}

BobEndpoint::~BobEndpoint() = default;

std::vector<Message> BobEndpoint::accept_pa_spec(const Message& m) {
  if (m.kind != MessageKind::PaSpec) throw ProtocolError("expected PA_SPEC");
  const auto spec = decode_pa_spec(m);
  reconciled_ = reconcile_->result();
  auto mine = secret_fraction(reconciled_.n(), config_.link.tx.mu, budget_epsilon(reconciled_), config_.policy,
                              BitBias{}, static_cast<double>(reconciled_.leak_bits));
  const auto& e = spec.echo;
  if (e.n != reconciled_.n() || e.ec_leak_bits != reconciled_.leak_bits || e.corrected != reconciled_.corrected) {
    throw ProtocolError("PA_SPEC echo disagrees with Bob's counts");
  }
  if (e.multi_photon_bits != mine.multi_photon_bits || e.breidbart_bits != mine.breidbart_bits ||
      e.safety_bits != mine.safety_bits) {
    throw ProtocolError("PA_SPEC budget items disagree with Bob's computation");
  }
  if (!(e.bias_bits >= 0.0) || e.bias_bits > static_cast<double>(e.n)) throw ProtocolError("implausible bias deduction");
  if (reconciled_.n() == 0 && e.bias_bits != 0.0) throw ProtocolError("bias deduction on an empty key");
  mine.bias_bits = e.bias_bits;
  if (reconciled_.n() > 0) {
    const double f = std::floor(static_cast<double>(mine.n) - mine.deductions());
    mine.f_secret = f > 0.0 ? static_cast<std::uint64_t>(f) : 0;
  }
  if (mine.f_secret != spec.f_secret) throw ProtocolError("PA_SPEC length does not follow from the budget");

  const auto n_rect = sift_.key().rectilinear;
  report_ = make_report(config_, sift_.raw_count(), n_rect, reconciled_, mine, KeyCheckStatus::Skipped, 0);
  if (mine.f_secret == 0) {
    stage_ = Stage::Done;
    return {};
  }
  check_ = std::make_unique<KeyCheckPhase>(Side::Bob, extract(reconciled_.bits, mine.f_secret, spec.pa_seed),
                                           config_.policy.keycheck_bits);
  stage_ = Stage::KeyCheck;
  return check_->start();
}

std::vector<Message> BobEndpoint::on_message(const Message& m) {
  switch (stage_) {
    case Stage::Sift: {
      auto out = sift_.on_message(m);
      if (sift_.done()) {
        reconcile_ = std::make_unique<ReconcileBob>(sift_.key().bits);
        auto more = reconcile_->start();
        out.insert(out.end(), more.begin(), more.end());
        stage_ = reconcile_->done() ? Stage::AwaitPaSpec : Stage::Reconcile;
      }
      return out;
    }
    case Stage::Reconcile: {
      auto out = reconcile_->on_message(m);
      if (reconcile_->done()) stage_ = Stage::AwaitPaSpec;
      return out;
    }
    case Stage::AwaitPaSpec:
      return accept_pa_spec(m);
    case Stage::KeyCheck: {
      auto out = check_->on_message(m);
      if (check_->done()) {
        key_ = check_->key();
        report_.key_check = check_->passed() ? KeyCheckStatus::Passed : KeyCheckStatus::Failed;
        report_.final_length = key_.size();
        stage_ = Stage::Done;
      }
      return out;
    }
    case Stage::Done: break;
  }
  throw ProtocolError("session already finished");
}

// ---------------------------------------------------------------------------

SessionResult run_session(const SessionConfig& config, Transcript* transcript) {
  const auto outcome = simulate_transmission(config.link, config.seed);
  return run_session(config, outcome, transcript);
}

SessionResult run_session(const SessionConfig& config, const TransmissionOutcome& outcome, Transcript* transcript) {
  AliceEndpoint alice(config, outcome);
  BobEndpoint bob(config, outcome);
  drive_loopback(bob, alice, transcript);
  if (alice.state() != Endpoint::State::Finished || bob.state() != Endpoint::State::Finished) {
    const auto& why = alice.abort_reason().empty() ? bob.abort_reason() : alice.abort_reason();
    throw SessionError("session aborted: " + (why.empty() ? std::string("stalled") : why));
  }
  if (!(alice.report() == bob.report())) throw std::logic_error("endpoint reports diverged");
  return {alice.report(), alice.key(), bob.key()};
}

EndpointResult run_session_endpoint(const SessionConfig& config, Side side, Transport& transport,
                                    Transcript* transcript) {
  const auto outcome = simulate_transmission(config.link, config.seed);
  std::unique_ptr<Endpoint> ep;
  const SessionReport* report = nullptr;
  const BitString* key = nullptr;
  if (side == Side::Alice) {
    auto a = std::make_unique<AliceEndpoint>(config, outcome);
    report = &a->report();
    key = &a->key();
    ep = std::move(a);
  } else {
    auto b = std::make_unique<BobEndpoint>(config, outcome);
    report = &b->report();
    key = &b->key();
    ep = std::move(b);
  }
  drive_remote(*ep, transport, transcript);
  if (ep->state() != Endpoint::State::Finished) throw SessionError("session aborted: " + ep->abort_reason());
  return {*report, *key};
}

// ---------------------------------------------------------------------------

KvSection SessionReport::to_section(std::string_view name) const {
  KvSection s;
  s.name = std::string(name);
  auto u = [&](const char* k, std::uint64_t v) { s.set(k, std::to_string(v)); };
  auto d = [&](const char* k, double v) { s.set(k, format_double(v)); };
  auto b = [&](const char* k, bool v) { s.set(k, v ? "true" : "false"); };
  u("seed", seed);
  u("session_id", session_id);
  d("mu", mu);
  d("eta_opt", eta_opt);
  d("eta_opt_over_c", channel_parameter);
  u("n_raw", n_raw);
  u("n_sifted", n_sifted);
  u("n_rectilinear", n_rectilinear);
  u("errors_corrected", errors_corrected);
  d("epsilon", epsilon);
  u("leak_bits", leak_bits);
  u("rounds", rounds);
  u("f_secret", f_secret);
  d("p_sif", p_sif);
  d("p_sif_to_secret", p_sif_to_secret);
  d("p_secret", p_secret);
  b("zero_yield", zero_yield);
  b("usd_safe", usd_safe);
  b("pns_safe", pns_safe);
  s.set("key_check", std::string(fsqkd::to_string(key_check)));
  u("final_length", final_length);
  d("budget_multi_photon", budget.multi_photon_bits);
  d("budget_breidbart", budget.breidbart_bits);
  d("budget_bias", budget.bias_bits);
  d("budget_ec_leak", budget.ec_leak_bits);
  d("budget_safety", budget.safety_bits);
  const auto audit = budget.audit();
  std::string items;
  for (std::size_t i = 0; i < audit.items.size(); ++i) {
    if (i) items += ' ';
    items += std::string(BudgetAudit::kNames[i]) + '=' + std::to_string(audit.items[i]);
  }
  s.set("audit", items);
  return s;
}

std::string SessionReport::to_text() const {
  KvDocument doc;
  doc.sections.push_back(to_section());
  return to_kv(doc);
}

SessionReport SessionReport::from_section(const KvSection& s) {
  SessionReport r;
  auto b = [&](const char* k) {
    const auto v = s.get(k);
    if (v != "true" && v != "false") throw std::invalid_argument(std::string("bad boolean for ") + k);
    return v == "true";
  };
  r.seed = s.get_u64("seed");
  r.session_id = s.get_u64("session_id");
  r.mu = s.get_double("mu");
  r.eta_opt = s.get_double("eta_opt");
  r.channel_parameter = s.get_double("eta_opt_over_c");
  r.n_raw = s.get_u64("n_raw");
  r.n_sifted = s.get_u64("n_sifted");
  r.n_rectilinear = s.get_u64("n_rectilinear");
  r.errors_corrected = s.get_u64("errors_corrected");
  r.epsilon = s.get_double("epsilon");
  r.leak_bits = s.get_u64("leak_bits");
  r.rounds = static_cast<std::uint32_t>(s.get_u64("rounds"));
  r.f_secret = s.get_u64("f_secret");
  r.p_sif = s.get_double("p_sif");
  r.p_sif_to_secret = s.get_double("p_sif_to_secret");
  r.p_secret = s.get_double("p_secret");
  r.zero_yield = b("zero_yield");
  r.usd_safe = b("usd_safe");
  r.pns_safe = b("pns_safe");
  const auto kc = s.get("key_check");
  if (kc == "passed") {
    r.key_check = KeyCheckStatus::Passed;
  } else if (kc == "failed") {
    r.key_check = KeyCheckStatus::Failed;
  } else if (kc == "skipped") {
    r.key_check = KeyCheckStatus::Skipped;
  } else {
    throw std::invalid_argument("bad key_check value: " + kc);
  }
  r.final_length = s.get_u64("final_length");
  r.budget.n = r.n_sifted;
  r.budget.f_secret = r.f_secret;
  r.budget.multi_photon_bits = s.get_double("budget_multi_photon");
  r.budget.breidbart_bits = s.get_double("budget_breidbart");
  r.budget.bias_bits = s.get_double("budget_bias");
  r.budget.ec_leak_bits = s.get_double("budget_ec_leak");
  r.budget.safety_bits = s.get_double("budget_safety");
  return r;
}

}  // namespace fsqkd
