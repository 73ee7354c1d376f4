#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

#include "evpix/bias_model.hpp"
#include "evpix/pixel_params.hpp"
#include "evpix/rng.hpp"

namespace evpix {

inline constexpr double kElementaryCharge = 1.602176634e-19;  // [C]

enum class Polarity : std::int8_t { Off = -1, On = 1 };

struct Event {
  std::int64_t t_us = 0;
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  Polarity polarity = Polarity::On;

  bool operator==(const Event&) const = default;
};

// The closed-form pieces of the pixel model are written so they accept either a
// scalar or an Eigen array expression for the illuminance argument.

/// Steady-state photoreceptor output [V]: (U_T/kappa) ln(E + E_dark) + V_p0.
template <typename Lux>
auto photoreceptor_voltage(const Lux& e_lux, const PixelParams& params, double v_p0) {
  using std::log;
  return params.volts_per_log() * log(e_lux + params.e_dark) + v_p0;
}

/// Photocurrent including the dark current [A].
template <typename Lux>
auto photocurrent(const Lux& e_lux, const PixelParams& params) {
  return params.k_lux_to_amps * (e_lux + params.e_dark);
}

/// Leak event rate [Hz]; grows linearly with illuminance above leak_lux_scale.
template <typename Lux>
auto leak_rate(const Lux& e_lux, const PixelParams& params) {
  return params.leak_rate_dark * (1.0 + e_lux / params.leak_lux_scale);
}

struct Poles {
  double f1 = 0;  ///< photoreceptor pole [Hz]
  double f2 = 0;  ///< source-follower pole [Hz]

  double bandwidth() const { return f1 < f2 ? f1 : f2; }
};

/// f1 = min(f_pr_per_amp * I_p, f_pr_cap_per_amp * i_pr), f2 = f_sf_per_amp * i_sf.
Poles bandwidth_poles(double e_lux, const BiasConfig& bias, const PixelParams& params);

/// RMS photocurrent shot noise at v_pr [V]: (U_T/kappa) sqrt(2 q f1 / I_p).
double shot_noise_sigma(double e_lux, const BiasConfig& bias, const PixelParams& params);

/// RMS of the photoreceptor bias-transistor noise at v_pr [V], before the
/// source follower. Its corner frequency is f_pr_cap_per_amp * i_pr.
double bias_noise_sigma(const PixelParams& params);

/// Largest step satisfying dt <= 0.1 / max(f1, f2) at the given illuminance.
double max_stable_dt(double e_lux, const BiasConfig& bias, const PixelParams& params);

struct EffectiveThresholds {
  double on = 0;
  double off = 0;
};

/// Leak seen as threshold drift: the ON threshold falls linearly to zero at
/// tau = 1/leak_rate while the OFF threshold rises with the same slope.
inline EffectiveThresholds effective_thresholds(double tau_since_reset, double theta_on,
                                                double theta_off, double leak_hz) {
  const double drift = theta_on * leak_hz * tau_since_reset;
  return {theta_on - drift > 0 ? theta_on - drift : 0.0, theta_off + drift};
}

/// Per-pixel thresholds after mismatch.
struct PixelThresholds {
  double on = 0;
  double off = 0;
};

struct PixelState {
  double v_pr = 0;          ///< photoreceptor pole output, without bias noise [V]
  double bias_noise = 0;    ///< bias-transistor noise currently riding on v_pr [V]
  double v_sf = 0;          ///< source-follower pole output [V]
  double v_sf_at_reset = 0; ///< change amplifier zero [V]
  double t_last_reset = 0;
  double in_refractory_until = 0;
  bool refractory = false;  ///< inside a refractory window that has not expired yet
  Xoshiro256Plus rng;

  // Per-illuminance coefficients, refreshed when the input changes.
  double cached_lux = std::numeric_limits<double>::quiet_NaN();
  double target = 0;
  double alpha1 = 0;
  double photon_step_sigma = 0;
};

/// Discrete-time pixel: two cascaded first-order poles, shot-noise injection,
/// change detection with leak drift, and a hard refractory window.
///
/// A PixelModel holds only immutable per-bias constants, so one instance can be
/// shared by any number of threads stepping disjoint PixelStates.
class PixelModel {
 public:
  /// Throws SamplingTooCoarse if dt violates the guard for the source-follower
  /// pole; the photoreceptor pole is checked as the illuminance changes.
  PixelModel(const BiasConfig& bias, const PixelParams& params, double dt);

  /// Settled state for a constant illuminance.
  PixelState initial_state(double e_lux, std::uint64_t rng_seed) const;

  /// Advances one step ending at time t. Returns the emitted event polarity,
  /// if any (at most one per step).
  std::optional<Polarity> step(PixelState& state, double e_lux, double t,
                               const PixelThresholds& thresholds, double leak_hz,
                               bool noise_enabled) const;

  /// v_diff reconstructed for plotting: reset_level - A (v_sf - v_sf_at_reset).
  /// Held at the reset level during refractory.
  double synthetic_v_diff(const PixelState& state) const;

  double dt() const { return dt_; }
  const DerivedPixelParams& derived() const { return derived_; }
  const PixelParams& params() const { return params_; }
  const BiasConfig& bias() const { return bias_; }
  PixelThresholds nominal_thresholds() const { return {derived_.theta_on, derived_.theta_off}; }

 private:
  void refresh(PixelState& state, double e_lux) const;

  BiasConfig bias_;
  PixelParams params_;
  DerivedPixelParams derived_;
  double dt_;
  double alpha2_;
  double inv_volts_per_log_;
  double bias_noise_decay_;
  double bias_noise_innovation_;
};

/// Single-step convenience form. Builds a PixelModel on every call; use
/// PixelModel directly in loops.
std::optional<Polarity> step_pixel(PixelState& state, double e_lux, double t, double dt,
                                   const BiasConfig& bias, const PixelParams& params,
                                   const PixelThresholds& thresholds, double leak_hz,
                                   bool noise_enabled);

}  // namespace evpix
