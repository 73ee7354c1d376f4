#pragma once

#include <string>

#include "evpix/pixel_params.hpp"

namespace evpix {

/// The user-facing bias control surface: six bias currents [A] plus the three
/// jAER-style tweaks in [-1, 1]. Currents are nominal values; the tweaks are
/// applied on top of them by derive_pixel_params().
///
/// Defaults give 0.25 log-e ON/OFF thresholds and a 500 us refractory period
/// with the default PixelParams.
struct BiasConfig {
  double i_pr = 3e-9;
  double i_sf = 15e-12;
  double i_d = 10e-9;
  double i_on = 10e-9 * std::exp(2.5);
  double i_off = 10e-9 * std::exp(-2.5);
  double i_refr = 100e-12;
  double threshold_tweak = 0;
  double onoff_balance_tweak = 0;
  double max_firing_rate_tweak = 0;

  /// Throws NonPositiveCurrent or TweakOutOfRange.
  void validate() const;

  bool operator==(const BiasConfig&) const = default;
};

/// Lowest max_firing_rate_tweak at which the refractory current can still pull
/// the pixel out of reset.
inline constexpr double kMinFiringRateTweak = -0.8;

/// Refractory periods shorter than this produce a visible reset-level droop in
/// real pixels; the simulator flags but does not model it.
inline constexpr double kRefractoryWarningS = 100e-6;

struct Thresholds {
  double on = 0;
  double off = 0;
  bool off_saturated = false;  ///< i_off sat at the i_min_off floor
};

struct DerivedPixelParams {
  double theta_on = 0;
  double theta_off = 0;
  double f_pr_max = 0;      ///< photoreceptor pole ceiling set by i_pr [Hz]
  double f_sf = 0;          ///< source-follower pole [Hz]
  double refractory_s = 0;
  double reset_level = 0;   ///< v_diff reset level relative to the comparator midpoint [V]
  bool off_saturated = false;
  bool refractory_warning = false;  ///< refractory_s below kRefractoryWarningS
};

/// theta_on = c_th ln(i_on/i_d), theta_off = c_th ln(i_d/i_off), with i_off
/// clamped at params.i_min_off.
Thresholds thresholds_from_biases(const BiasConfig& bias, const PixelParams& params);

/// Scales i_on up and i_off down by exp(tweak * k_tw); i_off stops at the floor.
BiasConfig apply_threshold_tweak(double tweak, BiasConfig nominal, const PixelParams& params);

/// Scales i_d by exp(-tweak * k_tw). A positive tweak therefore raises
/// theta_on and lowers theta_off; their sum does not change.
BiasConfig apply_onoff_balance_tweak(double tweak, BiasConfig nominal, const PixelParams& params);

/// refr_nominal_s * exp(-tweak * k_refr); throws PixelInoperative below -0.8.
double refractory_from_tweak(double tweak, const PixelParams& params);

/// v_diff reset level for a current set: the comparator trip levels sit at
/// -/+ (theta_on + theta_off)/2 around the midpoint, so only the reset level
/// moves when i_d changes.
double reset_level(const BiasConfig& bias, const PixelParams& params);

/// Applies all three tweaks and evaluates thresholds, poles and refractory.
DerivedPixelParams derive_pixel_params(const BiasConfig& bias, const PixelParams& params);

/// Flat "key = value" document with one line per BiasConfig field.
std::string to_key_value(const BiasConfig& bias);

/// Parses the document written by to_key_value(). Blank lines and lines
/// starting with '#' are skipped; unknown or duplicate keys are rejected.
BiasConfig bias_from_key_value(const std::string& text);

}  // namespace evpix
