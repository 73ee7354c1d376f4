#include "evpix/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "evpix/error.hpp"
#include "json.hpp"

namespace evpix {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

// Pulls typed fields out of one JSON object and remembers which keys were
// used, so anything left over can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) bad(where_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    used_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) bad(where_ + "." + key + ": expected true or false");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!it->is_number()) bad(where_ + "." + key + ": expected a number");
        if constexpr (std::is_integral_v<T>) {
          if (!it->is_number_integer() || (std::is_unsigned_v<T> && it->is_number_integer() &&
                                           !it->is_number_unsigned())) {
            bad(where_ + "." + key + ": expected a non-negative integer");
          }
        }
      }
      out = it->get<T>();
    } catch (const json::exception& e) {
      bad(where_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!used_.contains(key)) bad(where_ + ": unknown key '" + key + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

template <typename Visitor>
void visit_bias(BiasConfig& b, Visitor&& v) {
  v("i_pr", b.i_pr);
  v("i_sf", b.i_sf);
  v("i_d", b.i_d);
  v("i_on", b.i_on);
  v("i_off", b.i_off);
  v("i_refr", b.i_refr);
  v("threshold_tweak", b.threshold_tweak);
  v("onoff_balance_tweak", b.onoff_balance_tweak);
  v("max_firing_rate_tweak", b.max_firing_rate_tweak);
}

template <typename Visitor>
void visit_params(PixelParams& p, Visitor&& v) {
  v("u_t", p.u_t);
  v("kappa", p.kappa);
  v("amp_gain", p.amp_gain);
  v("e_dark", p.e_dark);
  v("k_lux_to_amps", p.k_lux_to_amps);
  v("c_th", p.c_th);
  v("k_tw", p.k_tw);
  v("k_refr", p.k_refr);
  v("refr_nominal_s", p.refr_nominal_s);
  v("i_refr_nominal", p.i_refr_nominal);
  v("i_min_off", p.i_min_off);
  v("f_pr_per_amp", p.f_pr_per_amp);
  v("f_pr_cap_per_amp", p.f_pr_cap_per_amp);
  v("f_sf_per_amp", p.f_sf_per_amp);
  v("pr_bias_noise", p.pr_bias_noise);
  v("leak_rate_dark", p.leak_rate_dark);
  v("leak_lux_scale", p.leak_lux_scale);
  v("mismatch_sigma_theta", p.mismatch_sigma_theta);
  v("mismatch_sigma_leak", p.mismatch_sigma_leak);
}

template <typename Visitor>
void visit_array(ArrayConfig& a, Visitor&& v) {
  v("width", a.width);
  v("height", a.height);
  v("seed", a.seed);
  v("mismatch", a.mismatch_enabled);
  v("noise", a.noise_enabled);
  v("leak", a.leak_enabled);
  v("dt", a.dt);
  v("threads", a.threads);
}

}  // namespace

ArrayConfig config_from_json(const std::string& text) {
  const json doc = parse(text);
  ObjectReader top(doc, "config");
  int version = 0;
  if (!doc.is_object() || !doc.contains("evpix_config_version")) bad("config: missing evpix_config_version");
  top.get("evpix_config_version", version);
  if (version != kConfigVersion) bad("config: unsupported evpix_config_version " + std::to_string(version));

  ArrayConfig cfg;
  if (const json* a = top.child("array")) {
    ObjectReader r(*a, "array");
    visit_array(cfg, [&](const char* k, auto& f) { r.get(k, f); });
    r.finish();
  }
  if (const json* b = top.child("bias")) {
    ObjectReader r(*b, "bias");
    visit_bias(cfg.bias, [&](const char* k, auto& f) { r.get(k, f); });
    r.finish();
  }
  if (const json* p = top.child("params")) {
    ObjectReader r(*p, "params");
    visit_params(cfg.params, [&](const char* k, auto& f) { r.get(k, f); });
    r.finish();
  }
  top.finish();

  if (cfg.width <= 0 || cfg.height <= 0) bad("array: width and height must be positive");
  if (cfg.width > 65535 || cfg.height > 65535) bad("array: width and height must fit in 16 bits");
  if (cfg.dt < 0) bad("array: dt must be >= 0");
  cfg.bias.validate();
  cfg.params.validate();
  return cfg;
}

std::string config_to_json(const ArrayConfig& cfg) {
  ArrayConfig c = cfg;
  json doc;
  doc["evpix_config_version"] = kConfigVersion;
  visit_array(c, [&](const char* k, auto& f) { doc["array"][k] = f; });
  visit_bias(c.bias, [&](const char* k, auto& f) { doc["bias"][k] = f; });
  visit_params(c.params, [&](const char* k, auto& f) { doc["params"][k] = f; });
  return doc.dump(2) + "\n";
}

void apply_seed_override(ArrayConfig& cfg) {
  const char* env = std::getenv("EVPIX_SEED");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 0);
  if (errno != 0 || *end != '\0' || *env == '-') bad(std::string("EVPIX_SEED is not an unsigned integer: ") + env);
  cfg.seed = v;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ArrayConfig load_config(const std::filesystem::path& path) {
  ArrayConfig cfg = config_from_json(read_text_file(path));
  apply_seed_override(cfg);
  return cfg;
}

Stimulus stimulus_from_json(const std::string& text, const std::filesystem::path& base_dir) {
  const json doc = parse(text);
  ObjectReader r(doc, "stimulus");
  std::string kind;
  r.get("kind", kind);
  if (kind.empty()) bad("stimulus: missing kind");

  if (kind == "frames") {
    std::string path;
    double fps = 30, lux_per_dn = 1;
    bool interpolate = false;
    r.get("path", path);
    r.get("fps", fps);
    r.get("lux_per_dn", lux_per_dn);
    r.get("interpolate", interpolate);
    r.finish();
    if (path.empty()) bad("stimulus: frames needs a path");
    if (!(fps > 0) || !(lux_per_dn > 0)) bad("stimulus: fps and lux_per_dn must be positive");
    std::filesystem::path p(path);
    if (p.is_relative()) p = base_dir / p;
    return frames_stimulus(p, fps, lux_per_dn, interpolate);
  }

  int width = 0, height = 0;
  double duration = 0, base_lux = 0;
  r.get("width", width);
  r.get("height", height);
  r.get("duration", duration);
  r.get("base_lux", base_lux);
  if (width <= 0 || height <= 0) bad("stimulus: width and height must be positive");
  if (!(duration > 0)) bad("stimulus: duration must be positive");
  if (!(base_lux >= 0)) bad("stimulus: base_lux must be >= 0");

  if (kind == "constant") {
    r.finish();
    return Stimulus::constant(width, height, duration, base_lux);
  }
  if (kind == "log_sine") {
    LogSineSpec s;
    r.get("contrast", s.contrast);
    r.get("freq_hz", s.freq_hz);
    r.get("phase_rad", s.phase_rad);
    r.finish();
    return Stimulus::log_sine(width, height, duration, base_lux, s);
  }
  if (kind == "log_step") {
    LogStepSpec s;
    r.get("t0", s.t0);
    r.get("log_e_step", s.log_e_step);
    r.finish();
    return Stimulus::log_step(width, height, duration, base_lux, s);
  }
  if (kind == "log_ramp") {
    LogRampSpec s;
    if (const json* k = r.child("knots")) {
      try {
        s.knots = k->get<std::vector<std::pair<double, double>>>();
      } catch (const json::exception& e) {
        bad(std::string("stimulus.knots: expected [[t, log_e], ...]: ") + e.what());
      }
    }
    r.finish();
    return Stimulus::log_ramp(width, height, duration, base_lux, std::move(s));
  }
  if (kind == "rotating_disk") {
    double rpm = 125;
    bool smooth = false;
    std::vector<Dot> dots;
    r.get("rpm", rpm);
    r.get("smooth_edges", smooth);
    if (const json* ds = r.child("dots")) {
      if (!ds->is_array()) bad("stimulus.dots: expected an array");
      for (std::size_t i = 0; i < ds->size(); ++i) {
        ObjectReader d((*ds)[i], "stimulus.dots[" + std::to_string(i) + "]");
        Dot dot;
        d.get("radius_px", dot.radius_px);
        d.get("angle_rad", dot.angle_rad);
        d.get("dot_radius_px", dot.dot_radius_px);
        d.get("contrast_log_e", dot.contrast_log_e);
        d.finish();
        dots.push_back(dot);
      }
    }
    r.finish();
    return rotating_disk(width, height, rpm, std::move(dots), base_lux, duration, smooth);
  }
  bad("stimulus: unknown kind '" + kind + "'");
}

Stimulus load_stimulus(const std::filesystem::path& path) {
  return stimulus_from_json(read_text_file(path), path.parent_path());
}

}  // namespace evpix
