#include "evpix/trace.hpp"

#include <cmath>
#include <cstdio>

#include "evpix/array_sim.hpp"
#include "evpix/error.hpp"
#include "evpix/pixel.hpp"
#include "evpix/rng.hpp"

namespace evpix {

std::vector<TraceSample> trace_pixel(const Stimulus& stim, const BiasConfig& bias, const PixelParams& params,
                                     const TraceOptions& opts) {
  if (opts.x < 0 || opts.y < 0 || opts.x >= stim.width() || opts.y >= stim.height()) {
    throw Error(ErrorCode::OutOfBounds, "trace pixel outside the stimulus");
  }
  ArrayConfig cfg;
  cfg.bias = bias;
  cfg.params = params;
  cfg.dt = opts.dt;
  const PixelModel model(bias, params, choose_dt(stim, cfg));
  const double dt = model.dt();
  const PixelThresholds th = model.nominal_thresholds();

  PixelState s = model.initial_state(stim.sample(opts.x, opts.y, 0.0),
                                     pixel_seed(opts.seed, opts.x, opts.y, RngStream::Noise));
  const auto n_end = static_cast<std::int64_t>(std::floor(stim.duration() / dt + 1e-9));
  std::vector<TraceSample> out;
  out.reserve(static_cast<std::size_t>(n_end) + 1);
  auto record = [&](double t, double lux, int ev) {
    out.push_back({t, lux, s.v_pr + s.bias_noise, s.v_sf, model.synthetic_v_diff(s), ev});
  };
  record(0.0, stim.sample(opts.x, opts.y, 0.0), 0);
  for (std::int64_t n = 1; n <= n_end; ++n) {
    const double t = n * dt;
    const double lux = stim.sample(opts.x, opts.y, t);
    const double leak = opts.leak_enabled ? leak_rate(lux, params) : 0.0;
    const auto p = model.step(s, lux, t, th, leak, opts.noise_enabled);
    record(t, lux, p ? static_cast<int>(*p) : 0);
  }
  return out;
}

std::string trace_csv(const std::vector<TraceSample>& samples) {
  std::string out = "t,e_lux,v_pr,v_sf,v_diff,event\n";
  char buf[160];
  for (const TraceSample& s : samples) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%d\n", s.t, s.e_lux, s.v_pr, s.v_sf, s.v_diff,
                  s.event);
    out += buf;
  }
  return out;
}

}  // namespace evpix
