#include "evpix/pixel_params.hpp"

#include <cmath>
#include <string>

#include "evpix/error.hpp"

namespace evpix {
namespace {

void require(bool ok, const char* name) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, std::string("pixel parameter ") + name + " out of range");
}

bool positive(double v) { return v > 0 && std::isfinite(v); }
bool non_negative(double v) { return v >= 0 && std::isfinite(v); }

}  // namespace

void PixelParams::validate() const {
  require(positive(u_t), "u_t");
  require(positive(kappa) && kappa <= 1.0, "kappa");
  require(positive(amp_gain), "amp_gain");
  require(positive(e_dark), "e_dark");
  require(positive(k_lux_to_amps), "k_lux_to_amps");
  require(positive(c_th), "c_th");
  require(positive(k_tw), "k_tw");
  require(positive(k_refr), "k_refr");
  require(positive(refr_nominal_s), "refr_nominal_s");
  require(positive(i_refr_nominal), "i_refr_nominal");
  require(positive(i_min_off), "i_min_off");
  require(positive(f_pr_per_amp), "f_pr_per_amp");
  require(positive(f_pr_cap_per_amp), "f_pr_cap_per_amp");
  require(positive(f_sf_per_amp), "f_sf_per_amp");
  require(non_negative(pr_bias_noise), "pr_bias_noise");
  require(positive(leak_rate_dark), "leak_rate_dark");
  require(positive(leak_lux_scale), "leak_lux_scale");
  require(non_negative(mismatch_sigma_theta), "mismatch_sigma_theta");
  require(non_negative(mismatch_sigma_leak), "mismatch_sigma_leak");
}

}  // namespace evpix
