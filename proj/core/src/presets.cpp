#include "fsqkd/presets.hpp"

#include <stdexcept>

namespace fsqkd {
namespace {

// Generated from data/presets.ini at configure time.
constexpr std::string_view kBuiltinPresetText =
#include "presets_data.inc"
    ;

}  // namespace

ChannelPreset preset_from_section(const KvSection& s) {
  ChannelPreset p;
  p.name = s.name;
  LinkParams& lp = p.link;
  lp.tx.mu = s.get_double("mu", lp.tx.mu);
  lp.tx.clock_rate_hz = s.get_double("clock_rate_hz", lp.tx.clock_rate_hz);
  lp.tx.misalignment_error = s.get_double("misalignment_error", lp.tx.misalignment_error);
  lp.rx.eta_rec = s.get_double("eta_rec", lp.rx.eta_rec);
  lp.rx.eta_fil = s.get_double("eta_fil", lp.rx.eta_fil);
  lp.rx.eta_bb84 = s.get_double("eta_bb84", lp.rx.eta_bb84);
  lp.rx.eta_det = s.get_double("eta_det", lp.rx.eta_det);
  lp.ch.eta_trans = s.get_double("eta_trans", lp.ch.eta_trans);
  lp.ch.eta_geo = s.get_double("eta_geo", lp.ch.eta_geo);
  lp.ch.background_c = s.get_double("background_c", lp.ch.background_c);
  p.jitter.mu_sigma = s.get_double("mu_sigma", 0.0);
  p.jitter.eta_geo_sigma = s.get_double("eta_geo_sigma", 0.0);
  p.jitter.c_sigma = s.get_double("c_sigma", 0.0);
  lp.validate();
  if (p.jitter.mu_sigma < 0 || p.jitter.eta_geo_sigma < 0 || p.jitter.c_sigma < 0) {
    throw std::invalid_argument("preset " + p.name + ": negative jitter");
  }
  return p;
}

KvSection preset_to_section(const ChannelPreset& p) {
  KvSection s;
  s.name = p.name;
  const LinkParams& lp = p.link;
  s.set("mu", format_double(lp.tx.mu));
  s.set("clock_rate_hz", format_double(lp.tx.clock_rate_hz));
  s.set("misalignment_error", format_double(lp.tx.misalignment_error));
  s.set("eta_rec", format_double(lp.rx.eta_rec));
  s.set("eta_fil", format_double(lp.rx.eta_fil));
  s.set("eta_bb84", format_double(lp.rx.eta_bb84));
  s.set("eta_det", format_double(lp.rx.eta_det));
  s.set("eta_trans", format_double(lp.ch.eta_trans));
  s.set("eta_geo", format_double(lp.ch.eta_geo));
  s.set("background_c", format_double(lp.ch.background_c));
  s.set("mu_sigma", format_double(p.jitter.mu_sigma));
  s.set("eta_geo_sigma", format_double(p.jitter.eta_geo_sigma));
  s.set("c_sigma", format_double(p.jitter.c_sigma));
  return s;
}

std::vector<ChannelPreset> parse_presets(std::string_view text) {
  std::vector<ChannelPreset> out;
  for (const auto& s : parse_kv(text).sections) {
    if (s.name.empty()) {
      if (!s.entries.empty()) throw std::runtime_error("preset file: entries outside a [section]");
      continue;
    }
    out.push_back(preset_from_section(s));
  }
  return out;
}

std::string format_presets(const std::vector<ChannelPreset>& presets) {
  KvDocument doc;
  for (const auto& p : presets) doc.sections.push_back(preset_to_section(p));
  return to_kv(doc);
}

const std::vector<ChannelPreset>& builtin_presets() {
  static const std::vector<ChannelPreset> presets = parse_presets(kBuiltinPresetText);
  return presets;
}

const ChannelPreset& find_preset(const std::vector<ChannelPreset>& presets, std::string_view name) {
  for (const auto& p : presets) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("unknown preset '" + std::string(name) + "'");
}

}  // namespace fsqkd
