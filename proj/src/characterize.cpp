#include "evpix/characterize.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "evpix/error.hpp"

namespace evpix {
namespace {

// Effectively unbounded; sweeps stop on their own schedule.
constexpr double kOpenEnded = 1e9;

double median_count(const CountMap& counts) {
  PixelMap as_double = counts.cast<double>();
  return rate_quantiles(as_double).median();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

SweepRow measure_noise(const ArrayConfig& cfg, double lux, const SweepOptions& opts, double x) {
  if (!(opts.min_duration_s > 0) || opts.max_duration_s < opts.min_duration_s) {
    throw Error(ErrorCode::InvalidConfig, "sweep durations must satisfy 0 < min <= max");
  }
  ArrayConfig c = cfg;
  c.width = opts.width;
  c.height = opts.height;
  ArraySimulator sim(Stimulus::constant(c.width, c.height, kOpenEnded, lux), c);
  EventCounts counts = sim.zero_counts();

  double t = opts.min_duration_s;
  sim.run_until(t, nullptr, &counts);
  while (t < opts.max_duration_s &&
         std::max(median_count(counts.on), median_count(counts.off)) < opts.target_events) {
    t = std::min(2 * t, opts.max_duration_s);
    sim.run_until(t, nullptr, &counts);
  }
  const double elapsed = sim.time();

  SweepRow row;
  row.x = x;
  row.theta_on = sim.model().derived().theta_on;
  row.theta_off = sim.model().derived().theta_off;
  const RateMap rates = per_pixel_rates(counts, elapsed);
  row.on = rates.on_quantiles;
  row.off = rates.off_quantiles;
  row.total = rate_quantiles(rates.on + rates.off);
  row.duration_s = elapsed;
  row.dt_s = sim.dt();
  return row;
}

std::string SweepTable::to_csv(bool gnuplot) const {
  const char sep = gnuplot ? ' ' : ',';
  std::ostringstream os;
  if (gnuplot) os << "# ";
  os << variable << sep << "theta_on" << sep << "theta_off";
  for (const char* pol : {"on", "off", "total"}) {
    for (const char* q : {"p05", "p25", "p50", "p75", "p95"}) os << sep << pol << '_' << q;
  }
  os << sep << "duration_s" << sep << "dt_s" << '\n';
  for (const SweepRow& r : rows) {
    os << fmt(r.x) << sep << fmt(r.theta_on) << sep << fmt(r.theta_off);
    for (const RateQuantiles* q : {&r.on, &r.off, &r.total}) {
      for (double v : q->values) os << sep << fmt(v);
    }
    os << sep << fmt(r.duration_s) << sep << fmt(r.dt_s) << '\n';
  }
  return os.str();
}

SweepTable sweep_noise_vs_illuminance(ArrayConfig cfg, std::span<const double> lux_grid,
                                      const SweepOptions& opts) {
  cfg.noise_enabled = cfg.leak_enabled = cfg.mismatch_enabled = true;
  SweepTable table{"lux", std::numeric_limits<double>::quiet_NaN(), cfg.bias, {}};
  for (double lux : lux_grid) table.rows.push_back(measure_noise(cfg, lux, opts, lux));
  return table;
}

SweepTable sweep_noise_vs_ipr_table(ArrayConfig cfg, std::span<const double> ipr_grid, double fixed_lux,
                                    const SweepOptions& opts) {
  cfg.noise_enabled = cfg.leak_enabled = cfg.mismatch_enabled = true;
  SweepTable table{"i_pr", fixed_lux, cfg.bias, {}};
  for (double ipr : ipr_grid) {
    ArrayConfig point = cfg;
    point.bias.i_pr = ipr;
    table.rows.push_back(measure_noise(point, fixed_lux, opts, ipr));
  }
  return table;
}

IprSweep sweep_noise_vs_ipr(ArrayConfig cfg, std::span<const double> ipr_grid, double fixed_lux,
                            const SweepOptions& opts) {
  IprSweep out;
  out.table = sweep_noise_vs_ipr_table(std::move(cfg), ipr_grid, fixed_lux, opts);
  const auto& rows = out.table.rows;
  if (rows.empty()) return out;
  double top = rows.front().x;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].total.median() > rows[out.argmax].total.median()) out.argmax = i;
    top = std::max(top, rows[i].x);
  }
  out.argmax_ipr = rows[out.argmax].x;
  double sum = 0;
  int n = 0;
  for (const SweepRow& r : rows) {
    if (r.x >= top / 10 * (1 - 1e-9)) {
      sum += r.total.median();
      ++n;
    }
  }
  out.plateau_rate = sum / n;
  return out;
}

ThresholdSweep sweep_noise_vs_threshold(ArrayConfig cfg, std::span<const double> tweak_grid, double fixed_lux,
                                        const SweepOptions& opts) {
  cfg.noise_enabled = cfg.leak_enabled = cfg.mismatch_enabled = true;
  ThresholdSweep out;
  out.table = {"threshold_tweak", fixed_lux, cfg.bias, {}};
  for (double tweak : tweak_grid) {
    ArrayConfig point = cfg;
    point.bias.threshold_tweak = tweak;
    out.table.rows.push_back(measure_noise(point, fixed_lux, opts, tweak));
  }
  out.leak_rate_hz = leak_rate(fixed_lux, cfg.params);

  std::vector<std::pair<double, double>> pts;
  for (const SweepRow& r : out.table.rows) {
    if (r.off.median() > 0) pts.emplace_back(r.theta_off, std::log(r.off.median()));
  }
  if (pts.size() >= 3) {
    Eigen::MatrixXd a(pts.size(), 3);
    Eigen::VectorXd b(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      a.row(i) << 1.0, pts[i].first, pts[i].first * pts[i].first;
      b(i) = pts[i].second;
    }
    const Eigen::VectorXd c = a.householderQr().solve(b);
    out.off_fit = {c(0), c(1), c(2)};
    out.concave_down = c(2) < 0;
  }
  return out;
}

std::vector<RefractoryRow> sweep_refractory(std::span<const double> tweak_grid, const PixelParams& params,
                                            const BiasConfig& bias) {
  std::vector<RefractoryRow> rows;
  for (double tweak : tweak_grid) {
    RefractoryRow r;
    r.tweak = tweak;
    if (tweak < kMinFiringRateTweak) {
      r.inoperative = true;
      r.refractory_s = std::numeric_limits<double>::quiet_NaN();
    } else {
      BiasConfig b = bias;
      b.max_firing_rate_tweak = tweak;
      r.refractory_s = derive_pixel_params(b, params).refractory_s;
      r.warning = r.refractory_s < kRefractoryWarningS;
    }
    rows.push_back(r);
  }
  return rows;
}

std::string refractory_csv(const std::vector<RefractoryRow>& rows, bool gnuplot) {
  const char sep = gnuplot ? ' ' : ',';
  std::ostringstream os;
  if (gnuplot) os << "# ";
  os << "max_firing_rate_tweak" << sep << "refractory_s" << sep << "inoperative" << sep << "warning\n";
  for (const RefractoryRow& r : rows) {
    os << fmt(r.tweak) << sep << (r.inoperative ? std::string("nan") : fmt(r.refractory_s)) << sep
       << r.inoperative << sep << r.warning << '\n';
  }
  return os.str();
}

}  // namespace evpix
