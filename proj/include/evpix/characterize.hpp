#pragma once

#include <span>
#include <string>
#include <vector>

#include "evpix/array_sim.hpp"

namespace evpix {

/// How long each grid point runs. A point runs for min_duration_s, then keeps
/// doubling its length until the larger of the ON/OFF median per-pixel counts
/// reaches target_events or max_duration_s is hit.
struct SweepOptions {
  int width = 64;
  int height = 64;
  double min_duration_s = 30;
  double max_duration_s = 300;
  double target_events = 100;
};

struct SweepRow {
  double x = 0;          ///< value of the swept variable
  double theta_on = 0;   ///< nominal thresholds at this point (log-e)
  double theta_off = 0;
  RateQuantiles on;
  RateQuantiles off;
  RateQuantiles total;   ///< per-pixel ON + OFF
  double duration_s = 0;
  double dt_s = 0;
};

struct SweepTable {
  std::string variable;  ///< header name of the swept column
  double fixed_lux = 0;  ///< NaN for illuminance sweeps
  BiasConfig bias;       ///< biases shared by all points (the swept one at its nominal)
  std::vector<SweepRow> rows;

  /// CSV with a header row. The gnuplot form is whitespace-separated with the
  /// header commented out.
  std::string to_csv(bool gnuplot = false) const;
};

/// Runs one constant-illuminance grid point on a fresh array.
SweepRow measure_noise(const ArrayConfig& cfg, double lux, const SweepOptions& opts, double x);

/// Quantiles of ON/OFF rates per illuminance. Noise, leak and mismatch are
/// forced on.
SweepTable sweep_noise_vs_illuminance(ArrayConfig cfg, std::span<const double> lux_grid,
                                      const SweepOptions& opts = {});

struct IprSweep {
  SweepTable table;
  std::size_t argmax = 0;     ///< row with the highest median total rate
  double argmax_ipr = 0;
  double plateau_rate = 0;    ///< mean median total rate over the top decade of the grid
};

SweepTable sweep_noise_vs_ipr_table(ArrayConfig cfg, std::span<const double> ipr_grid, double fixed_lux,
                                    const SweepOptions& opts);
IprSweep sweep_noise_vs_ipr(ArrayConfig cfg, std::span<const double> ipr_grid, double fixed_lux = 0.04,
                            const SweepOptions& opts = {});

struct ThresholdSweep {
  SweepTable table;
  /// ln(median OFF rate) = c0 + c1 theta + c2 theta^2, least squares over the
  /// rows with a positive OFF median. Empty if fewer than three such rows.
  std::vector<double> off_fit;
  bool concave_down = false;  ///< c2 < 0: the Gaussian-tail signature
  double leak_rate_hz = 0;    ///< leak rate at fixed_lux for a median pixel
};

ThresholdSweep sweep_noise_vs_threshold(ArrayConfig cfg, std::span<const double> tweak_grid,
                                        double fixed_lux = 0.04, const SweepOptions& opts = {});

struct RefractoryRow {
  double tweak = 0;
  double refractory_s = 0;   ///< NaN where the pixel is inoperative
  bool inoperative = false;  ///< tweak below -0.8
  bool warning = false;      ///< refractory shorter than 100 us
};

std::vector<RefractoryRow> sweep_refractory(std::span<const double> tweak_grid,
                                            const PixelParams& params = {}, const BiasConfig& bias = {});

std::string refractory_csv(const std::vector<RefractoryRow>& rows, bool gnuplot = false);

}  // namespace evpix
