#include "evpix/bias_model.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "evpix/error.hpp"

namespace evpix {
namespace {

void check_tweak(double tweak, const char* name) {
  if (!(tweak >= -1.0 && tweak <= 1.0)) {
    throw Error(ErrorCode::TweakOutOfRange,
                std::string(name) + " must lie in [-1, 1], got " + std::to_string(tweak));
  }
}

void check_current(double value, const char* name) {
  if (!(value > 0) || !std::isfinite(value)) {
    throw Error(ErrorCode::NonPositiveCurrent,
                std::string(name) + " must be a positive current, got " + std::to_string(value));
  }
}

struct Field {
  const char* name;
  double BiasConfig::*member;
};

constexpr std::array<Field, 9> kFields{{
    {"i_pr", &BiasConfig::i_pr},
    {"i_sf", &BiasConfig::i_sf},
    {"i_d", &BiasConfig::i_d},
    {"i_on", &BiasConfig::i_on},
    {"i_off", &BiasConfig::i_off},
    {"i_refr", &BiasConfig::i_refr},
    {"threshold_tweak", &BiasConfig::threshold_tweak},
    {"onoff_balance_tweak", &BiasConfig::onoff_balance_tweak},
    {"max_firing_rate_tweak", &BiasConfig::max_firing_rate_tweak},
}};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void BiasConfig::validate() const {
  check_current(i_pr, "i_pr");
  check_current(i_sf, "i_sf");
  check_current(i_d, "i_d");
  check_current(i_on, "i_on");
  check_current(i_off, "i_off");
  check_current(i_refr, "i_refr");
  check_tweak(threshold_tweak, "threshold_tweak");
  check_tweak(onoff_balance_tweak, "onoff_balance_tweak");
  check_tweak(max_firing_rate_tweak, "max_firing_rate_tweak");
}

Thresholds thresholds_from_biases(const BiasConfig& bias, const PixelParams& params) {
  check_current(bias.i_on, "i_on");
  check_current(bias.i_off, "i_off");
  check_current(bias.i_d, "i_d");
  Thresholds out;
  double i_off = bias.i_off;
  if (i_off <= params.i_min_off) {
    i_off = params.i_min_off;
    out.off_saturated = true;
  }
  const double log_on = std::log(bias.i_on / bias.i_d);
  const double log_off = std::log(bias.i_d / i_off);
  if (!(log_on > 0) || !(log_off > 0)) {
    throw Error(ErrorCode::DegenerateThreshold,
                "thresholds need i_on > i_d > i_off (log ratios " + std::to_string(log_on) + ", " +
                    std::to_string(log_off) + ")");
  }
  out.on = params.c_th * log_on;
  out.off = params.c_th * log_off;
  return out;
}

BiasConfig apply_threshold_tweak(double tweak, BiasConfig nominal, const PixelParams& params) {
  check_tweak(tweak, "threshold_tweak");
  const double scale = std::exp(tweak * params.k_tw);
  nominal.i_on *= scale;
  nominal.i_off = std::max(nominal.i_off / scale, params.i_min_off);
  return nominal;
}

BiasConfig apply_onoff_balance_tweak(double tweak, BiasConfig nominal, const PixelParams& params) {
  check_tweak(tweak, "onoff_balance_tweak");
  nominal.i_d *= std::exp(-tweak * params.k_tw);
  return nominal;
}

double refractory_from_tweak(double tweak, const PixelParams& params) {
  check_tweak(tweak, "max_firing_rate_tweak");
  if (tweak < kMinFiringRateTweak) {
    throw Error(ErrorCode::PixelInoperative,
                "max_firing_rate_tweak " + std::to_string(tweak) +
                    " is below -0.8: i_refr is too weak to release the pixel from reset");
  }
  return params.refr_nominal_s * std::exp(-tweak * params.k_refr);
}

double reset_level(const BiasConfig& bias, const PixelParams& params) {
  const Thresholds th = thresholds_from_biases(bias, params);
  return params.amp_gain * params.volts_per_log() * 0.5 * (th.off - th.on);
}

DerivedPixelParams derive_pixel_params(const BiasConfig& bias, const PixelParams& params) {
  bias.validate();
  BiasConfig tweaked = apply_threshold_tweak(bias.threshold_tweak, bias, params);
  tweaked = apply_onoff_balance_tweak(bias.onoff_balance_tweak, tweaked, params);
  const Thresholds th = thresholds_from_biases(tweaked, params);

  DerivedPixelParams out;
  out.theta_on = th.on;
  out.theta_off = th.off;
  out.off_saturated = th.off_saturated;
  out.f_pr_max = params.f_pr_cap_per_amp * bias.i_pr;
  out.f_sf = params.f_sf_per_amp * bias.i_sf;
  out.refractory_s = refractory_from_tweak(bias.max_firing_rate_tweak, params) *
                     (params.i_refr_nominal / bias.i_refr);
  out.reset_level = reset_level(tweaked, params);
  out.refractory_warning = out.refractory_s < kRefractoryWarningS;
  return out;
}

std::string to_key_value(const BiasConfig& bias) {
  std::ostringstream os;
  char buf[64];
  for (const auto& f : kFields) {
    std::snprintf(buf, sizeof buf, "%.17g", bias.*(f.member));
    os << f.name << " = " << buf << '\n';
  }
  return os.str();
}

BiasConfig bias_from_key_value(const std::string& text) {
  BiasConfig out;
  std::map<std::string, bool> seen;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Field* field = nullptr;
    for (const auto& f : kFields) {
      if (key == f.name) field = &f;
    }
    if (field == nullptr) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (seen[key]) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    seen[key] = true;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw Error(ErrorCode::InvalidConfig,
                  "line " + std::to_string(lineno) + ": '" + value + "' is not a number");
    }
    out.*(field->member) = v;
  }
  return out;
}

}  // namespace evpix
