// Acceptance suite: one PASS/FAIL line per criterion.
//
//   evpix_acceptance            run everything
//   evpix_acceptance 3 9        run criteria 3 and 9 only

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "evpix/array_sim.hpp"
#include "evpix/bias_model.hpp"
#include "evpix/characterize.hpp"
#include "evpix/cli.hpp"
#include "evpix/config.hpp"
#include "evpix/error.hpp"
#include "evpix/events.hpp"
#include "evpix/pixel.hpp"
#include "evpix/recommend.hpp"
#include "evpix/stimulus.hpp"

using namespace evpix;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& s) {
    if (!pass) return;
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("evpix_acceptance_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run_cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "evpix");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text) *err_text = err.str();
  return rc;
}

// Steady-state v_pr reached by stepping the pixel, not the closed form.
double settled_vpr(double lux) {
  BiasConfig bias;
  PixelParams params;
  const double dt = max_stable_dt(lux, bias, params);
  const PixelModel m(bias, params, dt);
  PixelState s = m.initial_state(lux, 1);
  const double f1 = bandwidth_poles(lux, bias, params).f1;
  const auto n = static_cast<long>(std::ceil(30.0 / (2 * std::numbers::pi * f1) / dt));
  for (long i = 1; i <= n; ++i) m.step(s, lux, i * dt, m.nominal_thresholds(), 0, false);
  return s.v_pr;
}

Outcome log_response() {
  Outcome o;
  // Start each run settled at E, then hold 2E until settled.
  auto shift = [](double lux) {
    BiasConfig bias;
    PixelParams params;
    const double dt = max_stable_dt(2 * lux, bias, params);
    const PixelModel m(bias, params, dt);
    PixelState s = m.initial_state(lux, 1);
    const double v0 = s.v_pr;
    const double f1 = bandwidth_poles(lux, bias, params).f1;
    const auto n = static_cast<long>(std::ceil(30.0 / (2 * std::numbers::pi * f1) / dt));
    for (long i = 1; i <= n; ++i) m.step(s, 2 * lux, i * dt, m.nominal_thresholds(), 0, false);
    return s.v_pr - v0;
  };
  const double ref = 0.0231;
  for (double e : {1.0, 10.0, 100.0, 1000.0}) {
    const double dv = shift(e);
    if (std::abs(dv - ref) > 0.01 * ref) o.fail(fmt("doubling %g lux gives %.4f mV", e, dv * 1e3));
  }
  for (double e : {0.05e-3, 0.1e-3, 0.2e-3}) {
    const double dv = shift(e);
    if (!(dv < 0.5 * ref)) o.fail(fmt("doubling %g lux gives %.4f mV", e, dv * 1e3));
  }
  // The stepped pixel must settle on the same level the log law gives.
  if (std::abs(settled_vpr(100.0) - photoreceptor_voltage(100.0, PixelParams{}, 0.0)) > 1e-6) {
    o.fail("stepped pixel does not settle on the log law");
  }
  o.note(fmt("dV(100->200 lux) = %.3f mV, dV(0.1->0.2 mlx) = %.3f mV", shift(100.0) * 1e3, shift(0.1e-3) * 1e3));
  return o;
}

Outcome contrast_invariance() {
  Outcome o;
  // Triangle wave in log-e, 1 unit peak to peak at 5 Hz. Both poles sit at
  // 100 Hz and are set by biases, so they do not depend on the light level.
  LogRampSpec ramp;
  for (int k = 0; k <= 20; ++k) ramp.knots.emplace_back(0.1 * k, k % 2 ? 1.0 : 0.0);
  ArrayConfig cfg;
  cfg.width = cfg.height = 2;
  cfg.mismatch_enabled = cfg.noise_enabled = cfg.leak_enabled = false;
  cfg.bias.i_pr = 100.0 / cfg.params.f_pr_cap_per_amp;
  cfg.bias.i_sf = 100.0 / cfg.params.f_sf_per_amp;
  cfg.dt = 5e-4;
  cfg.threads = 1;
  const EventStream a = simulate(Stimulus::log_ramp(2, 2, 2.0, 1.0, ramp), cfg);
  const EventStream b = simulate(Stimulus::log_ramp(2, 2, 2.0, 100.0, ramp), cfg);
  if (a.events.empty()) o.fail("no events");
  if (a.events.size() != b.events.size()) {
    o.fail(fmt("event counts differ: %zu vs %zu", a.events.size(), b.events.size()));
    return o;
  }
  std::int64_t worst = 0;
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const Event& x = a.events[i];
    const Event& y = b.events[i];
    if (x.x != y.x || x.y != y.y || x.polarity != y.polarity) {
      o.fail(fmt("event %zu differs in pixel or polarity", i));
      return o;
    }
    worst = std::max(worst, std::abs(x.t_us - y.t_us));
  }
  if (worst > std::llround(cfg.dt * 1e6)) o.fail(fmt("timestamps differ by %lld us", static_cast<long long>(worst)));
  o.note(fmt("%zu events each, max timestamp difference %lld us (dt %g us)", a.events.size(),
             static_cast<long long>(worst), cfg.dt * 1e6));
  return o;
}

Outcome counting_oracle() {
  Outcome o;
  PixelParams params;
  BiasConfig bias;
  bias.i_pr = 1000.0 / params.f_pr_cap_per_amp;
  bias.i_sf = 1000.0 / params.f_sf_per_amp;
  bias.max_firing_rate_tweak = 1.0;
  const double dt = 1e-4;
  const PixelModel model(bias, params, dt);
  const double theta = model.derived().theta_on;
  if (std::abs(model.derived().theta_off - theta) > 1e-12) o.fail("ON and OFF thresholds differ");

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> frac(0.1, 0.9), slope(0.5, 3.0), hold(0.0, 0.05);
  std::uniform_int_distribution<int> count(0, 5), runs_per_signal(4, 8);

  int total_runs = 0, bad_runs = 0;
  long total_events = 0;
  for (int sig = 0; sig < 200; ++sig) {
    // Ideal change detector: each run targets an extreme (k + u) thresholds
    // past the memorized level, so it must produce exactly k events.
    struct Run {
      double t0, t1;
      int dir;
      int expected;
    };
    std::vector<Run> runs;
    LogRampSpec spec;
    double t = 0.05, level = 0, ref = 0;
    spec.knots.emplace_back(0.0, 0.0);
    spec.knots.emplace_back(t, 0.0);
    int dir = (rng() & 1) ? 1 : -1;
    const int n_runs = runs_per_signal(rng);
    for (int r = 0; r < n_runs; ++r, dir = -dir) {
      int k = count(rng);
      const double u = frac(rng);
      // Keep the log offset within +-3 so the photoreceptor pole stays capped.
      while (k > 0 && std::abs(ref + dir * (k + u) * theta) > 3.0) --k;
      const double extreme = ref + dir * (k + u) * theta;
      const double t_end = t + std::abs(extreme - level) / slope(rng);
      runs.push_back({t, t_end, dir, k});
      spec.knots.emplace_back(t_end, extreme);
      ref += dir * k * theta;
      level = extreme;
      t = t_end + hold(rng);
      spec.knots.emplace_back(t, extreme);
    }
    const double duration = t + 0.05;
    const Stimulus stim = Stimulus::log_ramp(1, 1, duration, 100.0, spec);

    PixelState s = model.initial_state(stim.sample_uniform(0.0), 1);
    std::vector<int> got(runs.size(), 0);
    const auto steps = static_cast<long>(duration / dt);
    const double lag = 2e-3;
    for (long i = 1; i <= steps; ++i) {
      const double ti = i * dt;
      const auto p = model.step(s, stim.sample_uniform(ti), ti, model.nominal_thresholds(), 0, false);
      if (!p) continue;
      ++total_events;
      const double ta = ti - lag;
      auto it = std::find_if(runs.begin(), runs.end(), [&](const Run& r) { return ta >= r.t0 && ta < r.t1 + lag; });
      if (it == runs.end() || static_cast<int>(*p) != it->dir) {
        ++bad_runs;
        continue;
      }
      ++got[static_cast<std::size_t>(it - runs.begin())];
    }
    for (std::size_t r = 0; r < runs.size(); ++r) {
      ++total_runs;
      if (got[r] != runs[r].expected) ++bad_runs;
    }
  }
  if (bad_runs > 0) o.fail(fmt("%d of %d runs miscounted", bad_runs, total_runs));
  o.note(fmt("200 signals, %d monotone runs, %ld events, theta = %.3f", total_runs, total_events, theta));
  return o;
}

Outcome leak_determinism() {
  Outcome o;
  ArrayConfig cfg;
  cfg.width = cfg.height = 2;
  cfg.mismatch_enabled = cfg.noise_enabled = false;
  cfg.leak_enabled = true;
  cfg.bias.i_pr = 1000.0 / cfg.params.f_pr_cap_per_amp;
  cfg.threads = 1;
  const double refr = derive_pixel_params(cfg.bias, cfg.params).refractory_s;

  {
    const double lux = 10.0;
    const Stimulus stim = Stimulus::constant(2, 2, 30.0, lux);
    const double dt = choose_dt(stim, cfg);
    const EventStream es = simulate(stim, cfg);
    const double expect = 1.0 / leak_rate(lux, cfg.params) + refr;
    double worst = 0;
    int intervals = 0;
    for (int y = 0; y < 2; ++y) {
      for (int x = 0; x < 2; ++x) {
        std::int64_t last = -1;
        for (const Event& e : es.events) {
          if (e.x != x || e.y != y) continue;
          if (e.polarity != Polarity::On) o.fail("OFF event with noise disabled");
          if (last >= 0) {
            worst = std::max(worst, std::abs((e.t_us - last) * 1e-6 - expect));
            ++intervals;
          }
          last = e.t_us;
        }
      }
    }
    if (intervals < 40) o.fail(fmt("only %d intervals", intervals));
    if (worst > dt + 1e-6) o.fail(fmt("interval off by %.1f us (dt %.1f us)", worst * 1e6, dt * 1e6));
    o.note(fmt("%d intervals within %.1f us of %.6f s (dt %.1f us)", intervals, worst * 1e6, expect, dt * 1e6));
  }

  auto measured_rate = [&](double lux) {
    const EventStream es = simulate(Stimulus::constant(2, 2, 20.0, lux), cfg);
    double sum = 0;
    for (int y = 0; y < 2; ++y) {
      for (int x = 0; x < 2; ++x) {
        std::vector<std::int64_t> t;
        for (const Event& e : es.events) {
          if (e.x == x && e.y == y) t.push_back(e.t_us);
        }
        sum += (t.size() - 1) / ((t.back() - t.front()) * 1e-6);
      }
    }
    return sum / 4;
  };
  const double r100 = measured_rate(100.0), r200 = measured_rate(200.0);
  const double ratio = r200 / r100;
  if (std::abs(ratio - 2.0) > 0.1) o.fail(fmt("rate ratio %.4f", ratio));
  o.note(fmt("100 lux %.3f Hz, 200 lux %.3f Hz, ratio %.4f", r100, r200, ratio));
  return o;
}

Outcome refractory_cap() {
  Outcome o;
  // A +-3 log-e square wave at 1 kHz through a 382 Hz photoreceptor pole
  // keeps v_sf sweeping at more than 3000 log-e/s, so with 0.01 thresholds
  // the pixel fires again within a few us of every release.
  const double period = 1e-3, duration = 1.0;
  LogRampSpec sq;
  double level = 3.0;
  sq.knots.emplace_back(0.0, level);
  for (int k = 1; k * period / 2 < duration; ++k) {
    const double te = k * period / 2;
    sq.knots.emplace_back(te, level);
    level = -level;
    sq.knots.emplace_back(te + 1e-6, level);
  }
  const Stimulus stim = Stimulus::log_ramp(1, 1, duration, 1000.0, sq);

  for (double target : {200e-6, 1e-3, 10e-3}) {
    ArrayConfig cfg;
    cfg.width = cfg.height = 1;
    cfg.mismatch_enabled = cfg.noise_enabled = cfg.leak_enabled = false;
    cfg.threads = 1;
    cfg.bias.i_on = cfg.bias.i_d * std::exp(0.1);
    cfg.bias.i_off = cfg.bias.i_d * std::exp(-0.1);
    cfg.bias.i_pr = 1.0 / (2 * std::numbers::pi * period / 2.4) / cfg.params.f_pr_cap_per_amp;
    cfg.bias.i_sf = 1e5 / cfg.params.f_sf_per_amp;
    cfg.bias.max_firing_rate_tweak = -std::log(target / cfg.params.refr_nominal_s) / cfg.params.k_refr;
    const double refr = derive_pixel_params(cfg.bias, cfg.params).refractory_s;
    const EventStream es = simulate(stim, cfg);
    if (es.events.size() < 10) {
      o.fail(fmt("refractory %g s: only %zu events", refr, es.events.size()));
      continue;
    }
    const double span = (es.events.back().t_us - es.events.front().t_us) * 1e-6;
    const double rate = (es.events.size() - 1) / span;
    const double err = rate * refr - 1.0;
    if (std::abs(err) > 0.02) o.fail(fmt("refractory %g s: rate %.1f Hz (%+.2f%%)", refr, rate, 100 * err));
    o.note(fmt("%g s -> %.1f Hz (%+.2f%%)", refr, rate, 100 * err));
  }

  try {
    refractory_from_tweak(-0.81, PixelParams{});
    o.fail("tweak -0.81 accepted");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PixelInoperative) o.fail("tweak -0.81 rejected with the wrong code");
  }
  try {
    BiasConfig b;
    b.max_firing_rate_tweak = -0.81;
    derive_pixel_params(b, PixelParams{});
    o.fail("bias config with tweak -0.81 accepted");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PixelInoperative) o.fail("bias config with tweak -0.81 rejected with the wrong code");
  }
  return o;
}

std::string medians(const SweepTable& t, bool off) {
  std::string s;
  for (const auto& r : t.rows) s += fmt("%s%.4g", s.empty() ? "" : " ", off ? r.off.median() : r.on.median());
  return s;
}

Outcome threshold_tail() {
  Outcome o;
  ArrayConfig cfg;
  cfg.bias.i_pr = 3e-9;
  cfg.bias.i_sf = 15e-12;
  SweepOptions opts;
  opts.width = opts.height = 64;
  opts.min_duration_s = 100;
  opts.max_duration_s = 600;
  std::vector<double> grid;
  for (int i = 0; i < 7; ++i) grid.push_back(-1.0 / 3 + i * (4.0 / 3) / 6);
  const ThresholdSweep sw = sweep_noise_vs_threshold(cfg, grid, 0.04, opts);
  const auto& rows = sw.table.rows;

  std::vector<double> dec;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double a = rows[i].off.median(), b = rows[i + 1].off.median();
    if (!(b < a)) o.fail(fmt("OFF median not decreasing at tweak %.3f", rows[i + 1].x));
    if (a > 0 && b > 0) dec.push_back(std::log(a) - std::log(b));
  }
  if (dec.size() + 1 != rows.size()) {
    o.fail("zero OFF median in the grid");
  } else {
    for (std::size_t i = 0; i + 1 < dec.size(); ++i) {
      if (!(dec[i + 1] > dec[i])) o.fail(fmt("log decrement %zu does not grow (%.3f -> %.3f)", i, dec[i], dec[i + 1]));
    }
  }
  const double top_on = rows.back().on.median();
  const double rel = top_on / sw.leak_rate_hz - 1.0;
  if (std::abs(rel) > 0.2) o.fail(fmt("top ON median %.4g Hz vs leak %.4g Hz", top_on, sw.leak_rate_hz));
  std::string d;
  for (double x : dec) d += fmt("%s%.3f", d.empty() ? "" : " ", x);
  o.note("OFF medians [" + medians(sw.table, true) + "] Hz, log decrements [" + d + "]");
  o.note(fmt("top ON %.4g Hz vs leak %.4g Hz", top_on, sw.leak_rate_hz));
  return o;
}

Outcome bathtub() {
  Outcome o;
  ArrayConfig cfg;
  cfg.bias.i_pr = 30e-12;
  cfg.bias.i_sf = 15e-12;
  SweepOptions opts;
  opts.width = opts.height = 16;
  opts.min_duration_s = 30;
  opts.max_duration_s = 300;
  const std::vector<double> grid{1e-3, 1e-2, 0.03, 0.1, 0.3, 1, 10, 100, 1e3, 1e4};
  const SweepTable t = sweep_noise_vs_illuminance(cfg, grid, opts);
  const auto& rows = t.rows;
  const double e_dark = cfg.params.e_dark;

  // Dark regime: illuminance within a decade of the dark current.
  int dark_points = 0;
  for (const auto& r : rows) {
    if (r.x > 10 * e_dark) continue;
    ++dark_points;
    const double on = r.on.median(), off = r.off.median();
    if (!(on > 0 && off > 0)) {
      o.fail(fmt("%g lux: a polarity is missing", r.x));
    } else if (std::max(on, off) / std::min(on, off) > 2.0) {
      o.fail(fmt("%g lux: ON %.4g vs OFF %.4g Hz", r.x, on, off));
    }
  }
  if (dark_points == 0) o.fail("no dark grid points");

  std::size_t argmin = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].on.median() < rows[argmin].on.median()) argmin = i;
  }
  if (argmin == 0 || argmin + 1 == rows.size()) o.fail("ON minimum at the edge of the grid");

  // Bright regime: the top two decades.
  const double top = rows.back().x;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (r.x < top / 100 * (1 - 1e-9)) continue;
    if (!(r.off.median() < 0.01 * r.on.median())) o.fail(fmt("%g lux: OFF %.4g vs ON %.4g Hz", r.x, r.off.median(), r.on.median()));
    const double lx = std::log10(r.x), ly = std::log10(r.on.median());
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (n < 2 || !(std::abs(slope - 1.0) <= 0.1)) o.fail(fmt("bright log-log slope %.3f", slope));
  o.note("ON [" + medians(t, false) + "] OFF [" + medians(t, true) + "] Hz");
  o.note(fmt("ON minimum at %g lux, bright slope %.3f", rows[argmin].x, slope));
  return o;
}

Outcome ipr_nonmonotone() {
  Outcome o;
  ArrayConfig cfg;
  cfg.bias.i_sf = 30e-12;
  SweepOptions opts;
  opts.width = opts.height = 32;
  opts.min_duration_s = 30;
  opts.max_duration_s = 240;
  std::vector<double> grid;
  for (int i = 0; i < 7; ++i) grid.push_back(1e-13 * std::pow(10.0, i * 0.5));
  const IprSweep sw = sweep_noise_vs_ipr(cfg, grid, 0.04, opts);
  std::vector<double> m;
  for (const auto& r : sw.table.rows) m.push_back(r.total.median());

  int maxima = 0;
  std::size_t peak = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const bool above_left = i == 0 || m[i] > m[i - 1];
    const bool above_right = i + 1 == m.size() || m[i] > m[i + 1];
    if (above_left && above_right) ++maxima, peak = i;
  }
  if (maxima != 1) o.fail(fmt("%d local maxima", maxima));
  if (peak == 0 || peak + 1 == m.size()) o.fail("maximum at the edge of the grid");

  // Plateau: successive medians over the top decade of i_pr.
  const double top = grid.back();
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    if (grid[i] < top / 10 * (1 - 1e-9)) continue;
    const double step = std::abs(m[i + 1] / m[i] - 1.0);
    if (step > 0.15) o.fail(fmt("plateau step %.1f%% at %g A", 100 * step, grid[i + 1]));
  }
  std::string s;
  for (double v : m) s += fmt("%s%.4g", s.empty() ? "" : " ", v);
  o.note("total medians [" + s + "] Hz");
  o.note(fmt("peak at i_pr = %g A", grid[peak]));
  return o;
}

Outcome waveform() {
  Outcome o;
  const double contrast = 0.62, f = 5.0;
  // Counting oracle for a sine of this contrast: with theta_off = 2 theta_on
  // and theta_on = contrast / 2.5, the memorized level settles a fifth of the
  // swing above the trough. Each rise then yields floor((0.8 c) / theta_on)
  // = 2 ON events and each fall floor(c / theta_off) = 1 OFF event, with the
  // last crossing a tenth of the swing short of the peak.
  const double theta_on = contrast / 2.5, theta_off = 2 * theta_on;
  if (std::floor(contrast / theta_on) != 2 || std::floor(contrast / theta_off) != 1) o.fail("bad calibration");

  const fs::path dir = scratch_dir("waveform");
  PixelParams params;
  BiasConfig bias;
  bias.i_on = bias.i_d * std::exp(theta_on / params.c_th);
  bias.i_off = bias.i_d * std::exp(-theta_off / params.c_th);
  ArrayConfig cfg;
  cfg.width = cfg.height = 1;
  cfg.bias = bias;
  write_file(dir / "config.json", config_to_json(cfg));
  const int periods = 8;
  write_file(dir / "sine.json", fmt(R"({"kind": "log_sine", "width": 1, "height": 1, "duration": %g,)"
                                    R"( "base_lux": 10, "contrast": %g, "freq_hz": %g, "phase_rad": 0})",
                                    periods / f, contrast, f));
  std::string err;
  const int rc = run_cli({"trace", "--config", (dir / "config.json").string(), "--stimulus",
                          (dir / "sine.json").string(), "--out", (dir / "trace.csv").string()},
                         &err);
  if (rc != 0) {
    o.fail("trace failed: " + err);
    return o;
  }

  struct Ev {
    double t;
    int p;
  };
  std::vector<Ev> ev;
  std::istringstream in(slurp(dir / "trace.csv"));
  std::string line;
  std::getline(in, line);
  if (line != "t,e_lux,v_pr,v_sf,v_diff,event") o.fail("unexpected trace header");
  while (std::getline(in, line)) {
    const auto comma = line.rfind(',');
    const int p = std::stoi(line.substr(comma + 1));
    if (p != 0) ev.push_back({std::stod(line.substr(0, line.find(','))), p});
  }

  // Windows of 1.25 periods starting at each peak after the first period.
  const double period = 1 / f;
  int windows = 0;
  for (int k = 1; (k + 0.25 + 1.25) * period <= periods / f + 1e-9; ++k) {
    const double w0 = (k + 0.25) * period, w1 = w0 + 1.25 * period;
    int on = 0, off = 0;
    for (const Ev& e : ev) {
      if (e.t < w0 || e.t >= w1) continue;
      const bool rising = std::cos(2 * std::numbers::pi * f * e.t) > 0;
      if (e.p > 0) {
        ++on;
        if (!rising) o.fail(fmt("ON event at %.4f s in a falling half", e.t));
      } else {
        ++off;
        if (rising) o.fail(fmt("OFF event at %.4f s in a rising half", e.t));
      }
    }
    ++windows;
    if (on != 2 || off != 1) o.fail(fmt("window at %.3f s: %d ON, %d OFF", w0, on, off));
  }
  o.note(fmt("%d windows of 1.25 periods with 2 ON + 1 OFF; theta_on %.3f, theta_off %.3f", windows, theta_on,
             theta_off));
  return o;
}

Outcome bias_algebra() {
  Outcome o;
  const PixelParams p;
  const BiasConfig nominal;

  const Thresholds base = thresholds_from_biases(nominal, p);
  for (double s : {0.1, 0.5, 2.0, 10.0, 1e3}) {
    BiasConfig b = nominal;
    b.i_d *= s, b.i_on *= s, b.i_off *= s;
    const Thresholds t = thresholds_from_biases(b, p);
    if (std::abs(t.on - base.on) > 1e-12 * base.on || std::abs(t.off - base.off) > 1e-12 * base.off) {
      o.fail(fmt("thresholds change under scaling by %g", s));
    }
  }

  double worst_sum = 0;
  for (int i = -8; i <= 8; ++i) {
    const double tw = i / 8.0;
    const Thresholds t = thresholds_from_biases(apply_onoff_balance_tweak(tw, nominal, p), p);
    const double sum0 = base.on + base.off;
    worst_sum = std::max(worst_sum, std::abs(t.on + t.off - sum0) / sum0);
  }
  if (worst_sum > 1e-9) o.fail(fmt("balance tweak changes the sum by %.2e", worst_sum));

  double worst_log = 0;
  for (int i = -8; i <= 10; ++i) {
    const double tw = i / 10.0;
    const double r = refractory_from_tweak(tw, p);
    const double expect = std::log(p.refr_nominal_s) - tw * p.k_refr;
    worst_log = std::max(worst_log, std::abs(std::log(r) - expect));
  }
  if (worst_log > 1e-14) o.fail(fmt("refractory log-linearity error %.2e", worst_log));

  BiasConfig low = nominal;
  low.i_off = 2 * p.i_min_off;
  const Thresholds top = thresholds_from_biases(apply_threshold_tweak(1.0, low, p), p);
  const Thresholds mid = thresholds_from_biases(apply_threshold_tweak(0.75, low, p), p);
  const Thresholds lo = thresholds_from_biases(apply_threshold_tweak(0.25, low, p), p);
  if (!top.off_saturated || !mid.off_saturated) o.fail("OFF clamp does not engage at high tweaks");
  if (lo.off_saturated) o.fail("OFF clamp engaged at a low tweak");
  if (top.off != mid.off) o.fail("saturated OFF threshold still moves");
  if (!(top.on > mid.on)) o.fail("ON threshold stops rising");
  o.note(fmt("balance sum error %.1e, refractory log error %.1e, saturated theta_off %.4f", worst_sum, worst_log,
             top.off));
  return o;
}

int ordinal(Bandwidth v) { return static_cast<int>(v); }
int ordinal(Sensitivity v) { return static_cast<int>(v); }
int ordinal(Refractory v) { return static_cast<int>(v); }

Outcome recommender() {
  Outcome o;
  const auto& rules = default_rules();
  const auto all = ScenarioCriteria::all();
  if (all.size() != 64) o.fail("not 64 combinations");
  std::set<std::string> seen;
  for (const ScenarioCriteria& c : all) {
    std::string key;
    for (const auto& [name, value] : c.named_values()) key += std::string(name) + "=" + std::string(value) + ",";
    seen.insert(key);
    try {
      const BiasRecommendation rec = recommend(c, rules);
      const BiasConfig b = apply_tweaks(to_tweaks(rec), BiasConfig{});
      derive_pixel_params(b, PixelParams{});
      ArrayConfig cfg;
      cfg.bias = b;
      if (!(config_from_json(config_to_json(cfg)).bias == b)) o.fail("emitted config does not round-trip");
      if (rec.rationale.empty()) o.fail("empty rationale");
    } catch (const Error& e) {
      o.fail(std::string("combination ") + key + " failed: " + e.what());
    }
  }
  if (seen.size() != 64) o.fail("combinations are not distinct");

  // Flip one criterion at a time; each axis may only move the way the
  // changed rules push it.
  int flips = 0;
  for (const ScenarioCriteria& c : all) {
    const auto named = c.named_values();
    for (std::size_t i = 0; i < named.size(); ++i) {
      const std::string crit(named[i].first);
      for (const ScenarioCriteria& d : all) {
        const auto dn = d.named_values();
        bool single = true;
        for (std::size_t j = 0; j < dn.size(); ++j) single &= (j == i) != (dn[j].second == named[j].second);
        if (!single) continue;
        std::array<int, 3> push{};
        for (const Rule& r : rules) {
          if (r.criterion != crit) continue;
          const int sign = r.value == dn[i].second ? 1 : r.value == named[i].second ? -1 : 0;
          push[static_cast<int>(r.axis)] += sign * r.weight;
        }
        const BiasRecommendation a = recommend(c, rules), b = recommend(d, rules);
        const TweakSet ta = to_tweaks(a), tb = to_tweaks(b);
        const std::array<int, 3> moved{ordinal(b.bandwidth) - ordinal(a.bandwidth),
                                       ordinal(b.sensitivity) - ordinal(a.sensitivity),
                                       ordinal(b.refractory) - ordinal(a.refractory)};
        const std::array<double, 3> field{tb.isf_scale - ta.isf_scale, -(tb.threshold_tweak - ta.threshold_tweak),
                                          tb.max_firing_rate_tweak - ta.max_firing_rate_tweak};
        for (int ax = 0; ax < 3; ++ax) {
          const bool against = (push[ax] > 0 && (moved[ax] < 0 || field[ax] < 0)) ||
                                (push[ax] < 0 && (moved[ax] > 0 || field[ax] > 0)) ||
                                (push[ax] == 0 && (moved[ax] != 0 || field[ax] != 0));
          if (against) o.fail(fmt("flipping %s moves axis %d against its rules", crit.c_str(), ax));
        }
        ++flips;
      }
    }
  }
  if (flips != 64 * 6) o.fail(fmt("%d flips checked", flips));
  o.note(fmt("64 combinations valid, %d single-criterion flips monotone", flips));
  return o;
}

Outcome determinism_io() {
  Outcome o;
  const fs::path dir = scratch_dir("determinism");
  write_file(dir / "config.json", R"({"evpix_config_version": 1,
  "array": {"width": 48, "height": 48, "seed": 99, "mismatch": true, "noise": true, "leak": true},
  "bias": {"threshold_tweak": -0.3}
})");
  write_file(dir / "disk.json", R"({"kind": "rotating_disk", "width": 48, "height": 48, "duration": 0.4,
  "base_lux": 2, "rpm": 125,
  "dots": [{"radius_px": 15, "angle_rad": 0, "dot_radius_px": 4, "contrast_log_e": -1.5},
           {"radius_px": 10, "angle_rad": 2.5, "dot_radius_px": 3, "contrast_log_e": 1.0}]})");
  std::vector<std::string> files;
  for (const std::string threads : {"1", "4"}) {
    for (const std::string ext : {"bin", "csv"}) {
      const fs::path out = dir / ("events_" + threads + "." + ext);
      std::string err;
      if (run_cli({"simulate", "--config", (dir / "config.json").string(), "--stimulus", (dir / "disk.json").string(),
                   "--threads", threads, "--out", out.string()},
                  &err) != 0) {
        o.fail("simulate failed: " + err);
        return o;
      }
      files.push_back(slurp(out));
    }
  }
  if (files[0] != files[2]) o.fail("binary files differ between 1 and 4 threads");
  if (files[1] != files[3]) o.fail("CSV files differ between 1 and 4 threads");

  const EventStream bin = read_binary(dir / "events_1.bin");
  const EventStream csv = read_csv(dir / "events_1.csv", bin.width, bin.height);
  if (bin.events.size() < 100) o.fail(fmt("only %zu events", bin.events.size()));
  if (!(bin == csv)) o.fail("CSV and binary files decode to different streams");
  std::ostringstream b2, c2;
  write_binary(b2, bin);
  write_csv(c2, csv);
  if (b2.str() != files[0]) o.fail("binary round trip is not byte-identical");
  if (c2.str() != files[1]) o.fail("CSV round trip is not byte-identical");
  if (!(read_events(dir / "events_4.csv") == read_csv(dir / "events_4.csv"))) o.fail("format sniffing");
  o.note(fmt("%zu events, files identical for 1 and 4 threads, round trips byte-exact", bin.events.size()));
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "logarithmic response", 1, log_response},
      {2, "contrast invariance", 10, contrast_invariance},
      {3, "threshold-counting oracle", 30, counting_oracle},
      {4, "leak determinism and proportionality", 10, leak_determinism},
      {5, "refractory cap", 30, refractory_cap},
      {6, "noise-vs-threshold tail", 600, threshold_tail},
      {7, "noise-vs-illuminance bathtub", 600, bathtub},
      {8, "noise-vs-i_pr non-monotonicity", 600, ipr_nonmonotone},
      {9, "sine waveform event pattern", 5, waveform},
      {10, "bias/tweak algebra", 1, bias_algebra},
      {11, "recommender totality and monotonicity", 1, recommender},
      {12, "determinism and I/O", 60, determinism_io},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) out.fail(fmt("took %.1f s, budget %.0f s", secs, c.budget_s));
    failed += !out.pass;
    std::printf("%s %2d %s (%.2f s): %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs, out.detail.c_str());
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(fs::temp_directory_path() / ("evpix_acceptance_" + std::to_string(::getpid())), ec);
  return failed == 0 ? 0 : 1;
}
