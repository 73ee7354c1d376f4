#include "evpix/pixel.hpp"

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <numbers>
#include <string>

#include "evpix/error.hpp"

namespace evpix {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGuard = 0.1;

double pole_alpha(double f, double dt) { return -std::expm1(-kTwoPi * f * dt); }

void check_guard(double f, double dt, const char* which) {
  if (f * dt > kGuard * (1 + 1e-12)) {
    throw Error(ErrorCode::SamplingTooCoarse,
                std::string("dt = ") + std::to_string(dt) + " s is too coarse for the " + which +
                    " pole at " + std::to_string(f) + " Hz (need dt <= 0.1/f)");
  }
}

double standard_normal(Xoshiro256Plus& rng) {
  boost::random::normal_distribution<double> normal;
  return normal(rng);
}

}  // namespace

Poles bandwidth_poles(double e_lux, const BiasConfig& bias, const PixelParams& params) {
  const double light = params.f_pr_per_amp * photocurrent(e_lux, params);
  const double cap = params.f_pr_cap_per_amp * bias.i_pr;
  return {std::min(light, cap), params.f_sf_per_amp * bias.i_sf};
}

double shot_noise_sigma(double e_lux, const BiasConfig& bias, const PixelParams& params) {
  const double f1 = bandwidth_poles(e_lux, bias, params).f1;
  return params.volts_per_log() *
         std::sqrt(2.0 * kElementaryCharge * f1 / photocurrent(e_lux, params));
}

double bias_noise_sigma(const PixelParams& params) {
  return params.volts_per_log() * params.pr_bias_noise;
}

double max_stable_dt(double e_lux, const BiasConfig& bias, const PixelParams& params) {
  const Poles p = bandwidth_poles(e_lux, bias, params);
  return kGuard / std::max(p.f1, p.f2);
}

PixelModel::PixelModel(const BiasConfig& bias, const PixelParams& params, double dt)
    : bias_(bias), params_(params), derived_(derive_pixel_params(bias, params)), dt_(dt) {
  params_.validate();
  if (!(dt > 0)) throw Error(ErrorCode::SamplingTooCoarse, "dt must be positive");
  check_guard(derived_.f_sf, dt, "source-follower");
  alpha2_ = pole_alpha(derived_.f_sf, dt);
  inv_volts_per_log_ = 1.0 / params.volts_per_log();

  // The bias noise is an Ornstein-Uhlenbeck process with corner f_pr_max. What
  // reaches the (zero-order-hold) source follower is its average over each
  // step, so the recursion runs on step averages: decay exp(-x) and stationary
  // variance sigma^2 * 2 (x - 1 + e^-x) / x^2 with x = 2 pi f dt. This stays
  // faithful when f_pr_max is far above 1/dt.
  const double x = kTwoPi * derived_.f_pr_max * dt;
  const double sigma = bias_noise_sigma(params);
  const double avg_var = sigma * sigma * 2.0 * (x + std::expm1(-x)) / (x * x);
  bias_noise_decay_ = std::exp(-x);
  bias_noise_innovation_ = std::sqrt(avg_var * -std::expm1(-2.0 * x));
}

void PixelModel::refresh(PixelState& s, double e_lux) const {
  const Poles poles = bandwidth_poles(e_lux, bias_, params_);
  check_guard(poles.f1, dt_, "photoreceptor");
  s.cached_lux = e_lux;
  s.target = photoreceptor_voltage(e_lux, params_, 0.0);
  s.alpha1 = pole_alpha(poles.f1, dt_);
  // White per-step input whose AR(1)-filtered variance equals the shot-noise
  // variance at v_pr.
  const double sigma = shot_noise_sigma(e_lux, bias_, params_);
  s.photon_step_sigma = sigma * std::sqrt((2.0 - s.alpha1) / s.alpha1);
}

PixelState PixelModel::initial_state(double e_lux, std::uint64_t rng_seed) const {
  PixelState s;
  s.rng.seed(rng_seed);
  refresh(s, e_lux);
  s.v_pr = s.target;
  s.v_sf = s.target;
  s.v_sf_at_reset = s.target;
  return s;
}

std::optional<Polarity> PixelModel::step(PixelState& s, double e_lux, double t,
                                         const PixelThresholds& th, double leak_hz,
                                         bool noise_enabled) const {
  if (e_lux != s.cached_lux) refresh(s, e_lux);

  double input = s.target;
  if (noise_enabled) input += s.photon_step_sigma * standard_normal(s.rng);
  s.v_pr += s.alpha1 * (input - s.v_pr);
  if (noise_enabled && bias_noise_innovation_ > 0) {
    s.bias_noise = bias_noise_decay_ * s.bias_noise + bias_noise_innovation_ * standard_normal(s.rng);
  }
  const double v_sf_before = s.v_sf;
  s.v_sf += alpha2_ * (s.v_pr + s.bias_noise - s.v_sf);

  if (s.refractory) {
    if (t < s.in_refractory_until) return std::nullopt;
    // Release mid-step: the memorized level is v_sf at the expiry instant, so
    // only the part of this step after expiry counts toward the next event.
    const double u = std::clamp(1.0 - (t - s.in_refractory_until) / dt_, 0.0, 1.0);
    s.refractory = false;
    s.v_sf_at_reset = v_sf_before + u * (s.v_sf - v_sf_before);
    s.t_last_reset = s.in_refractory_until;
  }

  // The ON threshold is not floored here: past tau = 1/leak it keeps falling,
  // as the leaking v_diff would. A floor at zero makes each leak event fire at
  // a noise maximum and the next one wait for a higher maximum, so noise would
  // stretch the leak period without bound.
  const double contrast = (s.v_sf - s.v_sf_at_reset) * inv_volts_per_log_;
  const double drift = th.on * leak_hz * (t - s.t_last_reset);
  std::optional<Polarity> fired;
  if (contrast >= th.on - drift) {
    fired = Polarity::On;
  } else if (contrast <= -(th.off + drift)) {
    fired = Polarity::Off;
  } else {
    return std::nullopt;
  }
  s.refractory = true;
  s.in_refractory_until = t + derived_.refractory_s;
  return fired;
}

double PixelModel::synthetic_v_diff(const PixelState& s) const {
  if (s.refractory) return derived_.reset_level;
  return derived_.reset_level - params_.amp_gain * (s.v_sf - s.v_sf_at_reset);
}

std::optional<Polarity> step_pixel(PixelState& state, double e_lux, double t, double dt,
                                   const BiasConfig& bias, const PixelParams& params,
                                   const PixelThresholds& thresholds, double leak_hz,
                                   bool noise_enabled) {
  return PixelModel(bias, params, dt).step(state, e_lux, t, thresholds, leak_hz, noise_enabled);
}

}  // namespace evpix
