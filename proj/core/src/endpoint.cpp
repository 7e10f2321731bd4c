#include "fsqkd/endpoint.hpp"

#include <deque>
#include <istream>
#include <iterator>
#include <ostream>

namespace fsqkd {

std::vector<Frame> Endpoint::stamp(std::vector<Message> msgs) {
  std::vector<Frame> out;
  out.reserve(msgs.size());
  for (auto& m : msgs) {
    Frame f;
    f.kind = m.kind;
    f.session_id = session_id_;
    f.seq = next_seq_++;
    f.payload = std::move(m.payload);
    out.push_back(std::move(f));
  }
  if (state_ == State::Running && complete()) state_ = State::Finished;
  return out;
}

std::vector<Frame> Endpoint::abort_with(std::string reason) {
  state_ = State::Aborted;
  abort_reason_ = reason;
  Frame f;
  f.kind = MessageKind::Abort;
  f.session_id = session_id_;
  f.seq = next_seq_++;
  f.payload = encode(AbortPayload{std::move(reason)}).payload;
  return {std::move(f)};
}

std::vector<Frame> Endpoint::start() {
  if (state_ != State::Running) return {};
  try {
    return stamp(on_start());
  } catch (const ProtocolError& e) {
    return abort_with(e.what());
  } catch (const WireError& e) {
    return abort_with(e.what());
  }
}

std::vector<Frame> Endpoint::handle(const Frame& frame) {
  if (state_ != State::Running) return {};
  if (frame.version != kWireVersion) return abort_with("unsupported wire version");
  if (frame.session_id != session_id_) return abort_with("session id mismatch");
  if (frame.seq != next_seq_) {
    return abort_with("out-of-order frame: expected seq " + std::to_string(next_seq_) + ", got " +
                      std::to_string(frame.seq));
  }
  ++next_seq_;
  if (frame.kind == MessageKind::Abort) {
    state_ = State::Aborted;
    try {
      abort_reason_ = "peer aborted: " + decode_abort(frame.message()).reason;
    } catch (const WireError&) {
      abort_reason_ = "peer aborted";
    }
    return {};
  }
  try {
    return stamp(on_message(frame.message()));
  } catch (const ProtocolError& e) {
    return abort_with(e.what());
  } catch (const WireError& e) {
    return abort_with(std::string("malformed ") + std::string(to_string(frame.kind)) + ": " + e.what());
  }
}

void Transcript::write(std::ostream& out) const {
  for (const auto& f : frames_) {
    const auto bytes = encode_frame(f);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
}

Transcript Transcript::read(std::istream& in) {
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Transcript t;
  std::size_t pos = 0;
  while (pos < buf.size()) {
    std::size_t used = 0;
    auto f = decode_frame(std::span<const std::uint8_t>(buf).subspan(pos), &used);
    if (!f) throw WireError("transcript ends inside a frame");
    t.record(*f);
    pos += used;
  }
  return t;
}

TranscriptSummary scan_transcript(const Transcript& t) {
  TranscriptSummary s;
  for (const auto& f : t.frames()) {
    ++s.frames_by_kind[f.kind];
    s.total_bytes += kFrameHeaderSize + f.payload.size();
    if (f.kind == MessageKind::ParityReply) {
      s.parity_bits += decode_parity_reply(f.message()).items.size();
    } else if (f.kind == MessageKind::KeyCheck) {
      s.keycheck_bits += decode_key_check(f.message()).bits.size();
    }
  }
  return s;
}

void drive_loopback(Endpoint& a, Endpoint& b, Transcript* transcript) {
  struct InFlight {
    Endpoint* to;
    Endpoint* from;
    Frame frame;
  };
  std::deque<InFlight> queue;
  for (auto& f : a.start()) queue.push_back({&b, &a, std::move(f)});
  for (auto& f : b.start()) queue.push_back({&a, &b, std::move(f)});
  while (!queue.empty()) {
    InFlight item = std::move(queue.front());
    queue.pop_front();
    if (transcript) transcript->record(item.frame);
    for (auto& f : item.to->handle(item.frame)) queue.push_back({item.from, item.to, std::move(f)});
  }
}

void drive_remote(Endpoint& ep, Transport& transport, Transcript* transcript) {
  auto send_all = [&](std::vector<Frame> frames) {
    for (const auto& f : frames) {
      if (transcript) transcript->record(f);
      transport.send(f);
    }
  };
  send_all(ep.start());
  while (ep.state() == Endpoint::State::Running) {
    Frame f = transport.receive();
    if (transcript) transcript->record(f);
    send_all(ep.handle(f));
  }
}

}  // namespace fsqkd
