#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evpix/bias_model.hpp"
#include "evpix/pixel_params.hpp"
#include "evpix/stimulus.hpp"

namespace evpix {

struct TraceOptions {
  int x = 0;  ///< pixel of the stimulus to follow
  int y = 0;
  double dt = 0;  ///< 0 picks the guard limit for the stimulus
  bool noise_enabled = false;
  bool leak_enabled = false;
  std::uint64_t seed = 1;
};

/// One simulation step of a single pixel. Voltages are relative to the
/// photoreceptor offset; v_pr includes any bias noise.
struct TraceSample {
  double t = 0;
  double e_lux = 0;
  double v_pr = 0;
  double v_sf = 0;
  double v_diff = 0;
  int event = 0;  ///< +1 ON, -1 OFF, 0 none
};

/// Steps one pixel (nominal thresholds, no mismatch) over the stimulus duration.
std::vector<TraceSample> trace_pixel(const Stimulus& stim, const BiasConfig& bias, const PixelParams& params,
                                     const TraceOptions& opts = {});

/// CSV with header "t,e_lux,v_pr,v_sf,v_diff,event".
std::string trace_csv(const std::vector<TraceSample>& samples);

}  // namespace evpix
