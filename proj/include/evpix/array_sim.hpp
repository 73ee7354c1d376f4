#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <vector>

#include "evpix/bias_model.hpp"
#include "evpix/events.hpp"
#include "evpix/pixel.hpp"
#include "evpix/pixel_params.hpp"
#include "evpix/stimulus.hpp"

namespace evpix {

struct ArrayConfig {
  int width = 346;
  int height = 260;
  std::uint64_t seed = 1;
  bool mismatch_enabled = true;
  bool noise_enabled = true;
  bool leak_enabled = true;
  double dt = 0;  ///< [s]; 0 picks the largest step the guard allows for the stimulus
  BiasConfig bias;
  PixelParams params;
  unsigned threads = 0;  ///< worker threads; 0 uses the hardware concurrency
};

using PixelMap = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CountMap = Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-pixel multiplicative factors (rows = y), log-normal with median 1.
struct MismatchField {
  PixelMap theta_on;
  PixelMap theta_off;
  PixelMap leak;

  /// All ones when disabled. Pixel (x, y) draws from its own stream, so any
  /// sub-window of a larger array sees the same factors.
  static MismatchField generate(int width, int height, std::uint64_t seed, const PixelParams& params,
                                bool enabled);
};

/// cfg.dt if set, else 0.1 / max(f1, f2) at the brightest input. Throws
/// SamplingTooCoarse if an explicit dt violates the guard anywhere in range.
double choose_dt(const Stimulus& stim, const ArrayConfig& cfg);

struct EventCounts {
  CountMap on;
  CountMap off;
};

/// Steps a whole array in chunks. Row blocks run on worker threads; each pixel
/// owns its random stream, so the result does not depend on the thread count.
class ArraySimulator {
 public:
  ArraySimulator(Stimulus stim, ArrayConfig cfg);

  /// Advances to t_end (rounded down to a whole step). Events are appended to
  /// `events` in global order if given, and tallied in `counts` if given.
  void run_until(double t_end, std::vector<Event>* events, EventCounts* counts);

  double time() const { return static_cast<double>(steps_done_) * model_.dt(); }
  double dt() const { return model_.dt(); }
  const ArrayConfig& config() const { return cfg_; }
  const MismatchField& mismatch() const { return mismatch_; }
  const PixelModel& model() const { return model_; }
  EventCounts zero_counts() const;

 private:
  Stimulus stim_;
  ArrayConfig cfg_;
  PixelModel model_;
  MismatchField mismatch_;
  std::vector<PixelState> states_;  // row-major
  std::int64_t steps_done_ = 0;
};

/// Runs the stimulus over its full duration. Throws ConfigMismatch if the
/// stimulus and array sizes differ.
EventStream simulate(const Stimulus& stim, const ArrayConfig& cfg);

struct RateQuantiles {
  static constexpr std::array<double, 5> kLevels{0.05, 0.25, 0.50, 0.75, 0.95};
  std::array<double, 5> values{};  ///< [Hz], in kLevels order

  double median() const { return values[2]; }
};

struct RateMap {
  PixelMap on;   ///< [Hz]
  PixelMap off;  ///< [Hz]
  RateQuantiles on_quantiles;
  RateQuantiles off_quantiles;
};

/// Linear-interpolation quantiles (the usual "type 7" definition).
RateQuantiles rate_quantiles(const PixelMap& rates);

RateMap per_pixel_rates(const EventStream& stream, double duration);
RateMap per_pixel_rates(const EventCounts& counts, double duration);

}  // namespace evpix
