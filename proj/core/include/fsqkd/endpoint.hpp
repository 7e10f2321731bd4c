#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsqkd/wire.hpp"

namespace fsqkd {

enum class Side : std::uint8_t { Alice, Bob };

/// Protocol violation detected by a phase; the endpoint answers with ABORT.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One stage of an endpoint's conversation (sift, reconcile, ...).
class Phase {
 public:
  virtual ~Phase() = default;
  /// Messages to send when the phase becomes active (may be empty).
  virtual std::vector<Message> start() = 0;
  virtual std::vector<Message> on_message(const Message& m) = 0;
  virtual bool done() const = 0;
};

/// Single-threaded protocol endpoint driven by incoming frames.
///
/// Frames carry one session-wide sequence number: the conversation strictly
/// alternates, so each frame's seq is one more than the previous frame seen
/// by either side. Wrong session id, version or seq aborts the session.
class Endpoint {
 public:
  enum class State { Running, Finished, Aborted };

  explicit Endpoint(std::uint64_t session_id) : session_id_(session_id) {}
  virtual ~Endpoint() = default;
  Endpoint(const Endpoint&) = delete;
  Endpoint& operator=(const Endpoint&) = delete;

  std::vector<Frame> start();
  std::vector<Frame> handle(const Frame& frame);

  State state() const { return state_; }
  const std::string& abort_reason() const { return abort_reason_; }
  std::uint64_t session_id() const { return session_id_; }

 protected:
  virtual std::vector<Message> on_start() = 0;
  virtual std::vector<Message> on_message(const Message& m) = 0;
  virtual bool complete() const = 0;

 private:
  std::vector<Frame> stamp(std::vector<Message> msgs);
  std::vector<Frame> abort_with(std::string reason);

  std::uint64_t session_id_;
  std::uint32_t next_seq_ = 1;
  State state_ = State::Running;
  std::string abort_reason_;
};

/// Endpoint that runs exactly one phase; handy for exercising a phase alone.
class PhaseEndpoint final : public Endpoint {
 public:
  PhaseEndpoint(std::uint64_t session_id, Phase& phase) : Endpoint(session_id), phase_(phase) {}

 protected:
  std::vector<Message> on_start() override { return phase_.start(); }
  std::vector<Message> on_message(const Message& m) override { return phase_.on_message(m); }
  bool complete() const override { return phase_.done(); }

 private:
  Phase& phase_;
};

/// Passive record of every frame crossing the public channel, in order.
class Transcript {
 public:
  void record(const Frame& f) { frames_.push_back(f); }
  const std::vector<Frame>& frames() const { return frames_; }

  /// Log file format: the encoded frames back to back, verbatim.
  void write(std::ostream& out) const;
  static Transcript read(std::istream& in);

 private:
  std::vector<Frame> frames_;
};

/// What a passive monitor learns from a transcript.
struct TranscriptSummary {
  std::map<MessageKind, std::size_t> frames_by_kind;
  std::size_t parity_bits = 0;    ///< parity values disclosed in PARITY_REPLY
  std::size_t keycheck_bits = 0;  ///< final-key bits disclosed in KEYCHECK
  std::size_t total_bytes = 0;
};

TranscriptSummary scan_transcript(const Transcript& t);

/// Runs two endpoints against each other in the calling thread.
void drive_loopback(Endpoint& a, Endpoint& b, Transcript* transcript = nullptr);

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Blocking, ordered frame channel to the peer endpoint.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const Frame& frame) = 0;
  /// Throws TransportError when the peer has gone away.
  virtual Frame receive() = 0;
};

/// Runs one endpoint over a transport until it finishes or aborts.
void drive_remote(Endpoint& ep, Transport& transport, Transcript* transcript = nullptr);

}  // namespace fsqkd
