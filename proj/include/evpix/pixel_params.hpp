#pragma once

#include <cmath>
#include <numbers>

namespace evpix {

/// Physical and calibration constants of the pixel model.
///
/// Every field is overridable from the JSON config document. The defaults
/// describe a DAVIS346-like pixel; values marked "calibration" are not
/// measurable from first principles and were tuned so the simulated noise
/// statistics have the right qualitative shape.
struct PixelParams {
  double u_t = 0.025;    ///< thermal voltage [V]
  double kappa = 0.75;   ///< subthreshold slope factor of the feedback transistor
  double amp_gain = 20;  ///< change amplifier gain C1/C2 (only used for v_diff traces)
  double e_dark = 0.002; ///< dark-current equivalent illuminance [lux]
  double k_lux_to_amps = 25e-15;  ///< photocurrent per lux [A/lux]

  // Bias-to-threshold mapping.
  double c_th = 0.1;                           ///< TC threshold per e-fold of current ratio (calibration)
  double k_tw = std::numbers::ln2 * 2;         ///< e-folds of threshold current per tweak unit (4x)
  double k_refr = std::log(100.0);             ///< e-folds of refractory current per tweak unit (100x)
  double refr_nominal_s = 500e-6;              ///< refractory period at the reference refractory current [s]
  double i_refr_nominal = 100e-12;             ///< refractory current giving refr_nominal_s [A]
  double i_min_off = 0.05 * 10e-9 * std::exp(-2.5);  ///< OFF current floor, 5% of the default i_off [A]

  // Bandwidth.
  double f_pr_per_amp = 1.2e16;       ///< light-limited photoreceptor pole per amp of photocurrent [Hz/A]
  double f_pr_cap_per_amp = 1e14;    ///< photoreceptor pole ceiling per amp of i_pr [Hz/A]
  double f_sf_per_amp = 100.0 / 15e-12;  ///< source-follower pole per amp of i_sf [Hz/A]

  /// RMS of the noise injected by the photoreceptor bias transistor, in log-e
  /// units at v_pr. Its corner frequency is the i_pr pole, so the source
  /// follower removes more of it the higher i_pr is set (calibration).
  double pr_bias_noise = 0.03;

  // Leak.
  double leak_rate_dark = 0.05;  ///< leak event rate with no light [Hz]
  double leak_lux_scale = 1.0;   ///< illuminance at which the leak rate doubles [lux]

  // Fixed-pattern mismatch (relative log-normal sigmas).
  double mismatch_sigma_theta = 0.03;
  double mismatch_sigma_leak = 0.30;

  /// Volts per log-e unit at the photoreceptor output.
  double volts_per_log() const { return u_t / kappa; }

  /// Throws Error(InvalidConfig) unless every field is positive and kappa <= 1.
  /// The mismatch sigmas and pr_bias_noise may be zero.
  void validate() const;
};

}  // namespace evpix
