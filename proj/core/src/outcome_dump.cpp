#include <istream>
#include <ostream>
#include <stdexcept>

#include "fsqkd/kv_text.hpp"
#include "fsqkd/quantum_sim.hpp"

namespace fsqkd {
namespace {

constexpr const char* kFormat = "fsqkd-outcome";
constexpr const char* kVersion = "1";

void put_record(std::ostream& out, std::uint32_t slot, std::uint8_t flags) {
  const char rec[5] = {static_cast<char>(slot >> 24), static_cast<char>(slot >> 16),
                       static_cast<char>(slot >> 8), static_cast<char>(slot),
                       static_cast<char>(flags)};
  out.write(rec, sizeof rec);
}

bool get_record(std::istream& in, std::uint32_t& slot, std::uint8_t& flags) {
  unsigned char rec[5];
  if (!in.read(reinterpret_cast<char*>(rec), sizeof rec)) return false;
  slot = (std::uint32_t{rec[0]} << 24) | (std::uint32_t{rec[1]} << 16) |
         (std::uint32_t{rec[2]} << 8) | std::uint32_t{rec[3]};
  flags = rec[4];
  return true;
}

}  // namespace

void write_outcome(std::ostream& out, const TransmissionOutcome& o) {
  KvSection h;
  const LinkParams& lp = o.link;
  h.set("format", kFormat);
  h.set("version", kVersion);
  h.set("seed", std::to_string(o.seed));
  h.set("mu", format_double(lp.tx.mu));
  h.set("clock_rate_hz", format_double(lp.tx.clock_rate_hz));
  h.set("misalignment_error", format_double(lp.tx.misalignment_error));
  h.set("eta_rec", format_double(lp.rx.eta_rec));
  h.set("eta_fil", format_double(lp.rx.eta_fil));
  h.set("eta_bb84", format_double(lp.rx.eta_bb84));
  h.set("eta_det", format_double(lp.rx.eta_det));
  h.set("eta_trans", format_double(lp.ch.eta_trans));
  h.set("eta_geo", format_double(lp.ch.eta_geo));
  h.set("background_c", format_double(lp.ch.background_c));
  h.set("pulses", std::to_string(o.pulses.size()));
  h.set("detections", std::to_string(o.detections.size()));
  write_kv_header(out, h);

  for (const auto& p : o.pulses) {
    put_record(out, p.slot,
               static_cast<std::uint8_t>((p.bit ? 1u : 0u) | (p.basis == Basis::Diagonal ? 2u : 0u)));
  }
  for (const auto& d : o.detections) {
    put_record(out, d.slot,
               static_cast<std::uint8_t>(static_cast<unsigned>(d.detector) | (d.multi ? 4u : 0u)));
  }
  if (!out) throw std::runtime_error("write_outcome: stream error");
}

TransmissionOutcome read_outcome(std::istream& in) {
  const KvSection h = read_kv_header(in);
  if (h.get("format") != kFormat) throw std::runtime_error("read_outcome: not an outcome dump");
  if (h.get("version") != kVersion) throw std::runtime_error("read_outcome: unsupported version");

  TransmissionOutcome o;
  o.seed = h.get_u64("seed");
  LinkParams& lp = o.link;
  lp.tx.mu = h.get_double("mu");
  lp.tx.clock_rate_hz = h.get_double("clock_rate_hz");
  lp.tx.misalignment_error = h.get_double("misalignment_error");
  lp.rx.eta_rec = h.get_double("eta_rec");
  lp.rx.eta_fil = h.get_double("eta_fil");
  lp.rx.eta_bb84 = h.get_double("eta_bb84");
  lp.rx.eta_det = h.get_double("eta_det");
  lp.ch.eta_trans = h.get_double("eta_trans");
  lp.ch.eta_geo = h.get_double("eta_geo");
  lp.ch.background_c = h.get_double("background_c");
  lp.validate();

  const auto n_pulses = h.get_u64("pulses");
  const auto n_detections = h.get_u64("detections");
  o.pulses.reserve(n_pulses);
  o.detections.reserve(n_detections);
  std::uint32_t slot;
  std::uint8_t flags;
  for (std::uint64_t i = 0; i < n_pulses; ++i) {
    if (!get_record(in, slot, flags)) throw std::runtime_error("read_outcome: truncated pulse records");
    if (flags > 3) throw std::runtime_error("read_outcome: bad pulse flags");
    o.pulses.push_back({slot, (flags & 1u) != 0, (flags & 2u) ? Basis::Diagonal : Basis::Rectilinear});
  }
  for (std::uint64_t i = 0; i < n_detections; ++i) {
    if (!get_record(in, slot, flags)) throw std::runtime_error("read_outcome: truncated detection records");
    if (flags > 7) throw std::runtime_error("read_outcome: bad detection flags");
    if (i > 0 && slot <= o.detections.back().slot) {
      throw std::runtime_error("read_outcome: detections not sorted by slot");
    }
    o.detections.push_back({slot, static_cast<Detector>(flags & 3u), (flags & 4u) != 0});
  }
  return o;
}

}  // namespace fsqkd
