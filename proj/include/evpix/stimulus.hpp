#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace evpix {

enum class StimulusKind { Constant, LogSine, LogRamp, LogStep, RotatingDisk, Frames };

std::string to_string(StimulusKind kind);

/// One dot on the rotating disk. Positions are relative to the frame centre.
struct Dot {
  double radius_px = 0;      ///< distance of the dot centre from the rotation axis
  double angle_rad = 0;      ///< angular position at t = 0
  double dot_radius_px = 1;
  double contrast_log_e = 0; ///< illuminance inside the dot is base_lux * exp(contrast)
};

struct LogSineSpec {
  double contrast = 0;  ///< peak-to-peak log-e contrast
  double freq_hz = 1;
  double phase_rad = 0;
};

struct LogStepSpec {
  double t0 = 0;
  double log_e_step = 0;
};

/// Piecewise-linear log-illuminance offset; held flat outside the knot range.
struct LogRampSpec {
  std::vector<std::pair<double, double>> knots;  ///< (t [s], log-e offset), t strictly increasing
};

struct DiskSpec {
  double rpm = 125;
  std::vector<Dot> dots;
  bool smooth_edges = false;  ///< 1 px smoothstep instead of a hard edge
};

using Frame = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FramesSpec {
  std::vector<Frame> frames;  ///< already converted to lux
  double fps = 30;
  bool interpolate = false;
};

/// Time-varying illuminance field over a width x height pixel grid.
/// Immutable after construction; sample() is safe from any number of threads.
class Stimulus {
 public:
  static Stimulus constant(int width, int height, double duration, double base_lux);
  static Stimulus log_sine(int width, int height, double duration, double base_lux,
                           const LogSineSpec& spec);
  static Stimulus log_step(int width, int height, double duration, double base_lux,
                           const LogStepSpec& spec);
  static Stimulus log_ramp(int width, int height, double duration, double base_lux,
                           LogRampSpec spec);

  StimulusKind kind() const { return kind_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double duration() const { return duration_; }
  double base_lux() const { return base_lux_; }

  /// Illuminance [lux] at pixel (x, y) and time t. Throws OutOfBounds.
  double sample(int x, int y, double t) const;

  /// Writes one row of illuminance values; no bounds checks. out.size() must
  /// equal width().
  void sample_row(int y, double t, std::span<double> out) const;

  /// True when every pixel sees the same illuminance at all times.
  bool spatially_uniform() const;

  /// Illuminance of a spatially uniform stimulus.
  double sample_uniform(double t) const;

  /// Largest and smallest illuminance the stimulus can produce; used to pick
  /// a time step that satisfies the sampling guard everywhere.
  std::pair<double, double> lux_range() const;

  const LogSineSpec* log_sine_spec() const { return kind_ == StimulusKind::LogSine ? &sine_ : nullptr; }
  const LogStepSpec* log_step_spec() const { return kind_ == StimulusKind::LogStep ? &step_ : nullptr; }
  const LogRampSpec* log_ramp_spec() const { return kind_ == StimulusKind::LogRamp ? &ramp_ : nullptr; }
  const DiskSpec* disk_spec() const { return kind_ == StimulusKind::RotatingDisk ? disk_.get() : nullptr; }
  const FramesSpec* frames_spec() const { return kind_ == StimulusKind::Frames ? frames_.get() : nullptr; }

 private:
  friend Stimulus rotating_disk(int, int, double, std::vector<Dot>, double, double, bool);
  friend Stimulus frames_stimulus(std::vector<Frame>, double, bool);

  Stimulus(StimulusKind kind, int width, int height, double duration, double base_lux);
  double log_offset(double t) const;
  double disk_log(double x, double y, double t) const;
  double frame_lux(int x, int y, double t) const;

  StimulusKind kind_;
  int width_;
  int height_;
  double duration_;
  double base_lux_;
  LogSineSpec sine_;
  LogStepSpec step_;
  LogRampSpec ramp_;
  // Large payloads are shared so copies of a Stimulus stay cheap.
  std::shared_ptr<const DiskSpec> disk_;
  std::shared_ptr<const FramesSpec> frames_;
};

/// Disk of dots rotating about the frame centre at rpm. Later dots occlude
/// earlier ones. Throws InvalidGeometry if rpm <= 0 or a dot leaves the frame.
Stimulus rotating_disk(int width, int height, double rpm, std::vector<Dot> dots, double base_lux,
                       double duration, bool smooth_edges = false);

/// Frame-backed stimulus. Frame i is shown from i/fps; zero-order hold unless
/// interpolate is set. Throws InconsistentDimensions.
Stimulus frames_stimulus(std::vector<Frame> frames_lux, double fps, bool interpolate = false);

/// Loads binary PGM (P5) frames from a single file or every *.pgm file in a
/// directory (lexicographic order) and scales them by lux_per_dn.
Stimulus frames_stimulus(const std::filesystem::path& frame_dir_or_file, double fps,
                         double lux_per_dn, bool interpolate = false);

}  // namespace evpix
