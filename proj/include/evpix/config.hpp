#pragma once

#include <filesystem>
#include <string>

#include "evpix/array_sim.hpp"
#include "evpix/stimulus.hpp"

namespace evpix {

inline constexpr int kConfigVersion = 1;

// Config document:
//   {
//     "evpix_config_version": 1,
//     "array":  {"width", "height", "seed", "mismatch", "noise", "leak", "dt", "threads"},
//     "bias":   {"i_pr", "i_sf", "i_d", "i_on", "i_off", "i_refr",
//                "threshold_tweak", "onoff_balance_tweak", "max_firing_rate_tweak"},
//     "params": {any PixelParams field by name}
//   }
// Every section and field is optional; missing fields keep their defaults.
// Unknown keys anywhere are rejected with InvalidConfig.

ArrayConfig config_from_json(const std::string& text);
std::string config_to_json(const ArrayConfig& cfg);

/// Reads a config file and applies the EVPIX_SEED environment override.
ArrayConfig load_config(const std::filesystem::path& path);

/// Replaces cfg.seed with EVPIX_SEED when that variable is set.
void apply_seed_override(ArrayConfig& cfg);

// Stimulus document: {"kind": ..., "width", "height", "duration", "base_lux", ...}
//   constant
//   log_sine       "contrast", "freq_hz", "phase_rad"
//   log_step       "t0", "log_e_step"
//   log_ramp       "knots": [[t, log_e], ...]
//   rotating_disk  "rpm", "smooth_edges",
//                  "dots": [{"radius_px", "angle_rad", "dot_radius_px", "contrast_log_e"}, ...]
//   frames         "path", "fps", "lux_per_dn", "interpolate" (no width/height/duration/base_lux)
// Relative frame paths resolve against base_dir.

Stimulus stimulus_from_json(const std::string& text, const std::filesystem::path& base_dir = {});
Stimulus load_stimulus(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace evpix
