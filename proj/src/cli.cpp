#include "evpix/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "evpix/characterize.hpp"
#include "evpix/config.hpp"
#include "evpix/error.hpp"
#include "evpix/events.hpp"
#include "evpix/recommend.hpp"
#include "evpix/render.hpp"
#include "evpix/trace.hpp"

namespace evpix {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;

  ArrayConfig load() const {
    ArrayConfig cfg;
    if (!config.empty()) {
      cfg = load_config(config);
    } else {
      apply_seed_override(cfg);
    }
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = threads;
    return cfg;
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON config document")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "random seed (overrides config and EVPIX_SEED)");
  app->add_option("--threads", c.threads, "worker threads, 0 = all cores");
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

std::string frame_name(const fs::path& dir, const std::string& prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%05zu.pgm", i);
  return (dir / (prefix + buf)).string();
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::string stimulus;
  std::string out;
  std::string format = "auto";
};

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  ArrayConfig cfg = a.common.load();
  const Stimulus stim = load_stimulus(a.stimulus);
  const EventStream stream = simulate(stim, cfg);
  const bool csv = a.format == "csv" || (a.format == "auto" && fs::path(a.out).extension() == ".csv");
  if (csv) {
    write_csv(fs::path(a.out), stream);
  } else {
    write_binary(fs::path(a.out), stream);
  }
  out << "wrote " << stream.events.size() << " events (" << stream.width << "x" << stream.height << ", "
      << stim.duration() << " s) to " << a.out << '\n';
  return 0;
}

// --- sweep -----------------------------------------------------------------

struct SweepArgs {
  Common common;
  std::string kind;
  std::vector<double> grid;
  std::vector<double> log_grid;  // lo, hi, points
  double lux = 0.04;
  int size = 64;
  double min_s = 30;
  double max_s = 300;
  double target = 100;
  std::string out;
  bool gnuplot = false;
};

std::vector<double> sweep_grid(const SweepArgs& a) {
  if (!a.log_grid.empty()) {
    if (a.log_grid.size() != 3 || !(a.log_grid[0] > 0) || !(a.log_grid[1] > a.log_grid[0]) || a.log_grid[2] < 2) {
      throw CLI::ValidationError("--log-grid", "expects lo,hi,points with 0 < lo < hi and points >= 2");
    }
    const int n = static_cast<int>(a.log_grid[2]);
    std::vector<double> g;
    const double l0 = std::log10(a.log_grid[0]), l1 = std::log10(a.log_grid[1]);
    for (int i = 0; i < n; ++i) g.push_back(std::pow(10.0, l0 + (l1 - l0) * i / (n - 1)));
    return g;
  }
  if (a.grid.empty()) throw CLI::ValidationError("--grid", "give --grid or --log-grid");
  return a.grid;
}

int run_sweep(const SweepArgs& a, std::ostream& out) {
  const std::vector<double> grid = sweep_grid(a);
  std::string csv;
  if (a.kind == "refractory") {
    const ArrayConfig cfg = a.common.load();
    csv = refractory_csv(sweep_refractory(grid, cfg.params, cfg.bias), a.gnuplot);
  } else {
    const ArrayConfig cfg = a.common.load();
    SweepOptions opts{a.size, a.size, a.min_s, a.max_s, a.target};
    if (a.kind == "illuminance") {
      csv = sweep_noise_vs_illuminance(cfg, grid, opts).to_csv(a.gnuplot);
    } else if (a.kind == "ipr") {
      const IprSweep s = sweep_noise_vs_ipr(cfg, grid, a.lux, opts);
      csv = s.table.to_csv(a.gnuplot);
      std::cerr << "peak at i_pr = " << s.argmax_ipr << " A, top-decade mean " << s.plateau_rate << " Hz\n";
    } else {
      const ThresholdSweep s = sweep_noise_vs_threshold(cfg, grid, a.lux, opts);
      csv = s.table.to_csv(a.gnuplot);
      std::cerr << "leak rate " << s.leak_rate_hz << " Hz, ln(OFF) fit "
                << (s.concave_down ? "concave down" : "not concave down") << '\n';
    }
  }
  if (a.out.empty()) {
    out << csv;
  } else {
    write_file(a.out, csv);
  }
  return 0;
}

// --- recommend -------------------------------------------------------------

struct RecommendArgs {
  Common common;
  std::array<std::string, 6> values;
  std::string rules;
  std::string emit_config;
};

int run_recommend(const RecommendArgs& a, std::ostream& out) {
  ScenarioCriteria c;
  static constexpr std::array<const char*, 6> names{"data_priority",   "sensor_motion",   "background_illumination",
                                                    "object_size",     "object_contrast", "object_speed"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!set_criterion(c, names[i], a.values[i])) {
      throw CLI::ValidationError(names[i], "unknown value '" + a.values[i] + "'");
    }
  }
  const std::vector<Rule> rules = a.rules.empty() ? default_rules() : parse_rules(read_text_file(a.rules));
  const BiasRecommendation rec = recommend(c, rules);
  const TweakSet tw = to_tweaks(rec);
  auto signed_score = [](int s) { return (s > 0 ? "+" : "") + std::to_string(s); };
  out << "bandwidth:   " << to_string(rec.bandwidth) << " (" << signed_score(rec.scores[0]) << ")\n"
      << "sensitivity: " << to_string(rec.sensitivity) << " (" << signed_score(rec.scores[1]) << ")\n"
      << "refractory:  " << to_string(rec.refractory) << " (" << signed_score(rec.scores[2]) << ")\n"
      << "threshold_tweak = " << tw.threshold_tweak << "\n"
      << "i_sf scale = " << tw.isf_scale << "\n"
      << "max_firing_rate_tweak = " << tw.max_firing_rate_tweak << "\n"
      << "i_pr >= " << kRecommendedMinIpr << " A\n"
      << "rationale:\n";
  for (const std::string& line : rec.rationale) out << "  " << line << '\n';
  if (!a.emit_config.empty()) {
    ArrayConfig cfg = a.common.load();
    cfg.bias = apply_tweaks(tw, cfg.bias);
    write_file(a.emit_config, config_to_json(cfg));
    out << "config written to " << a.emit_config << '\n';
  }
  return 0;
}

// --- render ----------------------------------------------------------------

struct RenderArgs {
  std::string in;
  double window_ms = 10;
  int full_scale = 3;
  double t0_ms = 0;
  double t1_ms = -1;
  std::string out_dir = ".";
  std::string prefix = "frame";
};

int run_render(const RenderArgs& a, std::ostream& out, std::ostream& err) {
  const EventStream stream = read_events(a.in);
  const double window = a.window_ms * 1e-3;
  double t_end = a.t1_ms >= 0 ? a.t1_ms * 1e-3 : 0;
  if (a.t1_ms < 0) {
    for (const Event& e : stream.events) t_end = std::max(t_end, (e.t_us + 1) * 1e-6);
  }
  fs::create_directories(a.out_dir);
  std::size_t n = 0, empty = 0;
  for (double t0 = a.t0_ms * 1e-3; n == 0 || t0 < t_end - 1e-12; t0 = a.t0_ms * 1e-3 + window * n) {
    const RenderResult r = render_accumulation(stream, t0, window, a.full_scale);
    if (r.empty_window) {
      ++empty;
      err << "warning: code=EmptyWindow message=no events in [" << t0 << ", " << t0 + window << ") s\n";
    }
    write_pgm(frame_name(a.out_dir, a.prefix, n), r.image);
    ++n;
  }
  out << "wrote " << n << " frames (" << empty << " empty) to " << a.out_dir << '\n';
  return 0;
}

// --- stimulus preview ------------------------------------------------------

struct StimulusArgs {
  std::string stimulus;
  double fps = 100;
  std::string out_dir = ".";
  std::string prefix = "stim";
  int max_frames = 1000;
};

int run_stimulus(const StimulusArgs& a, std::ostream& out) {
  const Stimulus stim = load_stimulus(a.stimulus);
  auto [lo, hi] = stim.lux_range();
  lo = std::max(lo, 1e-6);
  hi = std::max(hi, lo);
  const double span = std::log(hi) - std::log(lo);
  fs::create_directories(a.out_dir);
  GrayImage img{stim.width(), stim.height(), 255, {}};
  img.pixels.resize(static_cast<std::size_t>(stim.width()) * stim.height());
  std::vector<double> row(stim.width());
  int n = 0;
  for (; n < a.max_frames && n / a.fps < stim.duration(); ++n) {
    const double t = n / a.fps;
    for (int y = 0; y < stim.height(); ++y) {
      stim.sample_row(y, t, row);
      for (int x = 0; x < stim.width(); ++x) {
        const double v = span > 0 ? (std::log(std::max(row[x], lo)) - std::log(lo)) / span : 0.5;
        img.pixels[static_cast<std::size_t>(y) * stim.width() + x] =
            static_cast<std::uint16_t>(std::lround(255 * std::clamp(v, 0.0, 1.0)));
      }
    }
    write_pgm(frame_name(a.out_dir, a.prefix, n), img);
  }
  out << "wrote " << n << " preview frames (log scale " << lo << " to " << hi << " lux) to " << a.out_dir << '\n';
  return 0;
}

// --- trace -----------------------------------------------------------------

struct TraceArgs {
  Common common;
  std::string stimulus;
  TraceOptions opts;
  std::string out;
};

int run_trace(const TraceArgs& a, std::ostream& out) {
  const ArrayConfig cfg = a.common.load();
  const Stimulus stim = load_stimulus(a.stimulus);
  TraceOptions opts = a.opts;
  opts.seed = cfg.seed;
  if (opts.dt == 0) opts.dt = cfg.dt;
  const std::string csv = trace_csv(trace_pixel(stim, cfg.bias, cfg.params, opts));
  if (a.out.empty()) {
    out << csv;
  } else {
    write_file(a.out, csv);
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"evpix: DVS pixel and array simulator", "evpix"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "run a stimulus through the array and write events");
  add_common(simulate_cmd, sim.common);
  simulate_cmd->add_option("--stimulus", sim.stimulus, "stimulus JSON")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--out", sim.out, "event file (.csv for CSV, anything else binary)")->required();
  simulate_cmd->add_option("--format", sim.format, "auto, csv or bin")
      ->check(CLI::IsMember({"auto", "csv", "bin"}));

  SweepArgs sw;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "noise characterization sweeps (CSV output)");
  add_common(sweep_cmd, sw.common);
  sweep_cmd->add_option("kind", sw.kind, "illuminance, ipr, threshold or refractory")
      ->required()
      ->check(CLI::IsMember({"illuminance", "ipr", "threshold", "refractory"}));
  sweep_cmd->add_option("--grid", sw.grid, "grid values (lux, amps or tweak)")->delimiter(',');
  sweep_cmd->add_option("--log-grid", sw.log_grid, "lo,hi,points log-spaced grid")->delimiter(',');
  sweep_cmd->add_option("--lux", sw.lux, "fixed illuminance for ipr/threshold sweeps");
  sweep_cmd->add_option("--size", sw.size, "array side length")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--min-s", sw.min_s, "shortest run per point [s]")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--max-s", sw.max_s, "longest run per point [s]")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--target", sw.target, "median event count that ends a point early");
  sweep_cmd->add_option("--out", sw.out, "CSV file (stdout if omitted)");
  sweep_cmd->add_flag("--gnuplot", sw.gnuplot, "whitespace-separated output");

  RecommendArgs rc;
  CLI::App* recommend_cmd = app.add_subcommand("recommend", "bias recommendation for a scenario");
  add_common(recommend_cmd, rc.common);
  recommend_cmd->add_option("--data-priority", rc.values[0], "high_fidelity or sparse")->required();
  recommend_cmd->add_option("--sensor-motion", rc.values[1], "static or moving")->required();
  recommend_cmd->add_option("--background", rc.values[2], "bright or dim")->required();
  recommend_cmd->add_option("--object-size", rc.values[3], "large or small")->required();
  recommend_cmd->add_option("--object-contrast", rc.values[4], "high or low")->required();
  recommend_cmd->add_option("--object-speed", rc.values[5], "fast or slow")->required();
  recommend_cmd->add_option("--rules", rc.rules, "rules file replacing the built-in table")
      ->check(CLI::ExistingFile);
  recommend_cmd->add_option("--emit-config", rc.emit_config, "write the tweaked config JSON here");

  RenderArgs rd;
  CLI::App* render_cmd = app.add_subcommand("render", "accumulate events into PGM frames");
  render_cmd->add_option("--in", rd.in, "event file")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("--window-ms", rd.window_ms, "frame window [ms]")->check(CLI::PositiveNumber);
  render_cmd->add_option("--full-scale", rd.full_scale, "events mapped to full white/black")
      ->check(CLI::Range(1, 1 << 30));
  render_cmd->add_option("--t0-ms", rd.t0_ms, "start of the first window [ms]");
  render_cmd->add_option("--t1-ms", rd.t1_ms, "stop rendering here [ms] (default: last event)");
  render_cmd->add_option("--out-dir", rd.out_dir, "output directory");
  render_cmd->add_option("--prefix", rd.prefix, "file name prefix");

  StimulusArgs st;
  CLI::App* stimulus_cmd = app.add_subcommand("stimulus", "write stimulus preview frames (log-scaled PGM)");
  stimulus_cmd->add_option("--stimulus", st.stimulus, "stimulus JSON")->required()->check(CLI::ExistingFile);
  stimulus_cmd->add_option("--fps", st.fps, "preview frame rate")->check(CLI::PositiveNumber);
  stimulus_cmd->add_option("--out-dir", st.out_dir, "output directory");
  stimulus_cmd->add_option("--prefix", st.prefix, "file name prefix");
  stimulus_cmd->add_option("--max-frames", st.max_frames, "frame limit")->check(CLI::PositiveNumber);

  TraceArgs tr;
  CLI::App* trace_cmd = app.add_subcommand("trace", "single-pixel step dump as CSV");
  add_common(trace_cmd, tr.common);
  trace_cmd->add_option("--stimulus", tr.stimulus, "stimulus JSON")->required()->check(CLI::ExistingFile);
  trace_cmd->add_option("--x", tr.opts.x, "pixel column");
  trace_cmd->add_option("--y", tr.opts.y, "pixel row");
  trace_cmd->add_option("--dt", tr.opts.dt, "time step [s], 0 = automatic");
  trace_cmd->add_flag("--noise", tr.opts.noise_enabled, "enable noise");
  trace_cmd->add_flag("--leak", tr.opts.leak_enabled, "enable leak events");
  trace_cmd->add_option("--out", tr.out, "CSV file (stdout if omitted)");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    }
    if (*simulate_cmd) return run_simulate(sim, out);
    if (*sweep_cmd) return run_sweep(sw, out);
    if (*recommend_cmd) return run_recommend(rc, out);
    if (*render_cmd) return run_render(rd, out, err);
    if (*stimulus_cmd) return run_stimulus(st, out);
    if (*trace_cmd) return run_trace(tr, out);
  } catch (const CLI::ParseError& e) {
    err << "error: code=Usage message=" << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: code=" << to_string(e.code()) << " message=" << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: code=IoError message=" << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: code=Internal message=" << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace evpix
