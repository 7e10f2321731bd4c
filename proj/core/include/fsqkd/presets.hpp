#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fsqkd/kv_text.hpp"
#include "fsqkd/link_model.hpp"

namespace fsqkd {

/// Spread applied to a preset's parameters independently for each 1-s run.
struct RunJitter {
  double mu_sigma = 0.0;       ///< absolute normal spread of mu
  double eta_geo_sigma = 0.0;  ///< log-normal sigma of eta_geo, mean preserving
  double c_sigma = 0.0;        ///< log-normal sigma of C; keeps the mean of 1/C
};

struct ChannelPreset {
  std::string name;
  LinkParams link;
  RunJitter jitter;
};

/// Parses a preset file (sections of key-value text). Keys not given fall
/// back to the LinkParams defaults; every preset is validated.
std::vector<ChannelPreset> parse_presets(std::string_view text);
std::string format_presets(const std::vector<ChannelPreset>& presets);

/// Presets compiled into the library; same content as data/presets.ini.
const std::vector<ChannelPreset>& builtin_presets();

/// Throws std::out_of_range for unknown names.
const ChannelPreset& find_preset(const std::vector<ChannelPreset>& presets, std::string_view name);

ChannelPreset preset_from_section(const KvSection& section);
KvSection preset_to_section(const ChannelPreset& preset);

}  // namespace fsqkd
