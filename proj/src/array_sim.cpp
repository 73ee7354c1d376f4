#include "evpix/array_sim.hpp"

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <thread>

#include "evpix/error.hpp"
#include "evpix/rng.hpp"

namespace evpix {
namespace {

constexpr std::int64_t kChunkSteps = 1 << 14;

std::int64_t step_time_us(std::int64_t n, double dt) {
  // The epsilon keeps exact multiples (n * dt = k us) from rounding down.
  return static_cast<std::int64_t>(std::floor(static_cast<double>(n) * dt * 1e6 + 1e-6));
}

unsigned worker_count(unsigned requested, int rows) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return std::min<unsigned>(n, static_cast<unsigned>(rows));
}

}  // namespace

MismatchField MismatchField::generate(int width, int height, std::uint64_t seed, const PixelParams& params,
                                      bool enabled) {
  MismatchField m;
  m.theta_on = PixelMap::Ones(height, width);
  m.theta_off = PixelMap::Ones(height, width);
  m.leak = PixelMap::Ones(height, width);
  if (!enabled) return m;
  boost::random::normal_distribution<double> normal;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      Xoshiro256Plus rng(pixel_seed(seed, x, y, RngStream::Mismatch));
      m.theta_on(y, x) = std::exp(params.mismatch_sigma_theta * normal(rng));
      m.theta_off(y, x) = std::exp(params.mismatch_sigma_theta * normal(rng));
      m.leak(y, x) = std::exp(params.mismatch_sigma_leak * normal(rng));
    }
  }
  return m;
}

double choose_dt(const Stimulus& stim, const ArrayConfig& cfg) {
  const auto [lo, hi] = stim.lux_range();
  (void)lo;
  const double limit = max_stable_dt(hi, cfg.bias, cfg.params);
  if (cfg.dt > 0) {
    if (cfg.dt > limit * (1 + 1e-12)) {
      throw Error(ErrorCode::SamplingTooCoarse, "dt = " + std::to_string(cfg.dt) +
                                                    " s exceeds the guard limit " + std::to_string(limit) +
                                                    " s at " + std::to_string(hi) + " lux");
    }
    return cfg.dt;
  }
  return limit;
}

ArraySimulator::ArraySimulator(Stimulus stim, ArrayConfig cfg)
    : stim_(std::move(stim)),
      cfg_(std::move(cfg)),
      model_(cfg_.bias, cfg_.params, choose_dt(stim_, cfg_)),
      mismatch_(MismatchField::generate(cfg_.width, cfg_.height, cfg_.seed, cfg_.params, cfg_.mismatch_enabled)) {
  if (stim_.width() != cfg_.width || stim_.height() != cfg_.height) {
    throw Error(ErrorCode::ConfigMismatch, "stimulus is " + std::to_string(stim_.width()) + "x" +
                                               std::to_string(stim_.height()) + " but the array is " +
                                               std::to_string(cfg_.width) + "x" + std::to_string(cfg_.height));
  }
  states_.reserve(static_cast<std::size_t>(cfg_.width) * cfg_.height);
  std::vector<double> row(cfg_.width);
  for (int y = 0; y < cfg_.height; ++y) {
    stim_.sample_row(y, 0.0, row);
    for (int x = 0; x < cfg_.width; ++x) {
      states_.push_back(model_.initial_state(row[x], pixel_seed(cfg_.seed, x, y, RngStream::Noise)));
    }
  }
}

EventCounts ArraySimulator::zero_counts() const {
  return {CountMap::Zero(cfg_.height, cfg_.width), CountMap::Zero(cfg_.height, cfg_.width)};
}

void ArraySimulator::run_until(double t_end, std::vector<Event>* events, EventCounts* counts) {
  const double dt = model_.dt();
  const auto n_end = static_cast<std::int64_t>(std::floor(t_end / dt + 1e-9));
  if (n_end <= steps_done_) return;
  const int width = cfg_.width;
  const int height = cfg_.height;
  const bool uniform = stim_.spatially_uniform();
  const unsigned workers = worker_count(cfg_.threads, height);
  const PixelThresholds nominal = model_.nominal_thresholds();

  std::vector<std::vector<Event>> found(workers);
  std::vector<double> uniform_lux;

  for (std::int64_t n0 = steps_done_; n0 < n_end; n0 += kChunkSteps) {
    const std::int64_t n1 = std::min(n_end, n0 + kChunkSteps);
    if (uniform) {
      uniform_lux.resize(static_cast<std::size_t>(n1 - n0));
      for (std::int64_t n = n0 + 1; n <= n1; ++n) uniform_lux[n - n0 - 1] = stim_.sample_uniform(n * dt);
    }

    auto work = [&](unsigned w) {
      std::vector<double> row(width);
      std::vector<Event>& out = found[w];
      for (int y = static_cast<int>(w); y < height; y += static_cast<int>(workers)) {
        PixelState* states = &states_[static_cast<std::size_t>(y) * width];
        if (uniform) {
          // One pixel at a time keeps its state in registers across the chunk.
          for (int x = 0; x < width; ++x) {
            PixelState& s = states[x];
            const PixelThresholds th{nominal.on * mismatch_.theta_on(y, x), nominal.off * mismatch_.theta_off(y, x)};
            const double leak_scale = cfg_.leak_enabled ? mismatch_.leak(y, x) : 0.0;
            for (std::int64_t n = n0 + 1; n <= n1; ++n) {
              const double lux = uniform_lux[n - n0 - 1];
              const double leak = leak_scale > 0 ? leak_scale * leak_rate(lux, cfg_.params) : 0.0;
              if (auto p = model_.step(s, lux, n * dt, th, leak, cfg_.noise_enabled)) {
                out.push_back({step_time_us(n, dt), static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), *p});
              }
            }
          }
        } else {
          for (std::int64_t n = n0 + 1; n <= n1; ++n) {
            const double t = n * dt;
            stim_.sample_row(y, t, row);
            for (int x = 0; x < width; ++x) {
              const PixelThresholds th{nominal.on * mismatch_.theta_on(y, x),
                                       nominal.off * mismatch_.theta_off(y, x)};
              const double leak = cfg_.leak_enabled ? mismatch_.leak(y, x) * leak_rate(row[x], cfg_.params) : 0.0;
              if (auto p = model_.step(states[x], row[x], t, th, leak, cfg_.noise_enabled)) {
                out.push_back({step_time_us(n, dt), static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), *p});
              }
            }
          }
        }
      }
    };

    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }

    for (auto& list : found) {
      if (counts) {
        for (const Event& e : list) {
          auto& map = e.polarity == Polarity::On ? counts->on : counts->off;
          ++map(e.y, e.x);
        }
      }
      if (events) events->insert(events->end(), list.begin(), list.end());
      list.clear();
    }
  }
  if (events) std::sort(events->begin(), events->end(), event_order);
  steps_done_ = n_end;
}

EventStream simulate(const Stimulus& stim, const ArrayConfig& cfg) {
  ArraySimulator sim(stim, cfg);
  EventStream out;
  out.width = static_cast<std::uint32_t>(cfg.width);
  out.height = static_cast<std::uint32_t>(cfg.height);
  sim.run_until(stim.duration(), &out.events, nullptr);
  return out;
}

RateQuantiles rate_quantiles(const PixelMap& rates) {
  RateQuantiles q;
  if (rates.size() == 0) return q;
  std::vector<double> v(rates.data(), rates.data() + rates.size());
  std::sort(v.begin(), v.end());
  for (std::size_t i = 0; i < q.values.size(); ++i) {
    const double pos = RateQuantiles::kLevels[i] * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    q.values[i] = v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  }
  return q;
}

RateMap per_pixel_rates(const EventCounts& counts, double duration) {
  if (!(duration > 0)) throw Error(ErrorCode::InvalidConfig, "rate duration must be positive");
  RateMap r;
  r.on = counts.on.cast<double>() / duration;
  r.off = counts.off.cast<double>() / duration;
  r.on_quantiles = rate_quantiles(r.on);
  r.off_quantiles = rate_quantiles(r.off);
  return r;
}

RateMap per_pixel_rates(const EventStream& stream, double duration) {
  EventCounts c{CountMap::Zero(stream.height, stream.width), CountMap::Zero(stream.height, stream.width)};
  for (const Event& e : stream.events) {
    if (e.x >= stream.width || e.y >= stream.height) {
      throw Error(ErrorCode::OutOfBounds, "event outside the " + std::to_string(stream.width) + "x" +
                                              std::to_string(stream.height) + " sensor");
    }
    ++(e.polarity == Polarity::On ? c.on : c.off)(e.y, e.x);
  }
  return per_pixel_rates(c, duration);
}

}  // namespace evpix
