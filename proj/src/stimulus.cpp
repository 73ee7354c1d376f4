#include "evpix/stimulus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "evpix/error.hpp"
#include "evpix/pgm.hpp"

namespace evpix {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_dims(int width, int height) {
  if (width < 1 || height < 1 || width > 65535 || height > 65535) {
    throw Error(ErrorCode::InvalidGeometry, "stimulus dimensions must be in 1..65535");
  }
}

double smoothstep(double e0, double e1, double x) {
  const double u = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

}  // namespace

std::string to_string(StimulusKind kind) {
  switch (kind) {
    case StimulusKind::Constant: return "constant";
    case StimulusKind::LogSine: return "log_sine";
    case StimulusKind::LogRamp: return "log_ramp";
    case StimulusKind::LogStep: return "log_step";
    case StimulusKind::RotatingDisk: return "rotating_disk";
    case StimulusKind::Frames: return "frames";
  }
  return "?";
}

Stimulus::Stimulus(StimulusKind kind, int width, int height, double duration, double base_lux)
    : kind_(kind), width_(width), height_(height), duration_(duration), base_lux_(base_lux) {
  check_dims(width, height);
  if (!(duration > 0)) throw Error(ErrorCode::InvalidConfig, "stimulus duration must be positive");
  if (!(base_lux >= 0) || !std::isfinite(base_lux)) {
    throw Error(ErrorCode::InvalidConfig, "base_lux must be a non-negative number");
  }
}

Stimulus Stimulus::constant(int width, int height, double duration, double base_lux) {
  return Stimulus(StimulusKind::Constant, width, height, duration, base_lux);
}

Stimulus Stimulus::log_sine(int width, int height, double duration, double base_lux,
                            const LogSineSpec& spec) {
  if (!(spec.freq_hz > 0) || !std::isfinite(spec.contrast)) {
    throw Error(ErrorCode::InvalidConfig, "log_sine needs a positive frequency and finite contrast");
  }
  Stimulus s(StimulusKind::LogSine, width, height, duration, base_lux);
  s.sine_ = spec;
  return s;
}

Stimulus Stimulus::log_step(int width, int height, double duration, double base_lux,
                            const LogStepSpec& spec) {
  if (!std::isfinite(spec.log_e_step)) throw Error(ErrorCode::InvalidConfig, "log_step needs a finite step");
  Stimulus s(StimulusKind::LogStep, width, height, duration, base_lux);
  s.step_ = spec;
  return s;
}

Stimulus Stimulus::log_ramp(int width, int height, double duration, double base_lux,
                            LogRampSpec spec) {
  if (spec.knots.empty()) throw Error(ErrorCode::InvalidConfig, "log_ramp needs at least one knot");
  for (std::size_t i = 1; i < spec.knots.size(); ++i) {
    if (!(spec.knots[i].first > spec.knots[i - 1].first)) {
      throw Error(ErrorCode::InvalidConfig, "log_ramp knot times must be strictly increasing");
    }
  }
  Stimulus s(StimulusKind::LogRamp, width, height, duration, base_lux);
  s.ramp_ = std::move(spec);
  return s;
}

double Stimulus::log_offset(double t) const {
  switch (kind_) {
    case StimulusKind::LogSine:
      return 0.5 * sine_.contrast * std::sin(kTwoPi * sine_.freq_hz * t + sine_.phase_rad);
    case StimulusKind::LogStep:
      return t < step_.t0 ? 0.0 : step_.log_e_step;
    case StimulusKind::LogRamp: {
      const auto& k = ramp_.knots;
      if (t <= k.front().first) return k.front().second;
      if (t >= k.back().first) return k.back().second;
      const auto hi = std::upper_bound(k.begin(), k.end(), t,
                                       [](double v, const auto& knot) { return v < knot.first; });
      const auto lo = hi - 1;
      const double u = (t - lo->first) / (hi->first - lo->first);
      return lo->second + u * (hi->second - lo->second);
    }
    default:
      return 0.0;
  }
}

double Stimulus::disk_log(double x, double y, double t) const {
  const double cx = 0.5 * (width_ - 1);
  const double cy = 0.5 * (height_ - 1);
  const double omega = kTwoPi * disk_->rpm / 60.0;
  double log_e = 0.0;
  for (const Dot& d : disk_->dots) {
    const double a = d.angle_rad + omega * t;
    const double dx = x - (cx + d.radius_px * std::cos(a));
    const double dy = y - (cy + d.radius_px * std::sin(a));
    const double dist = std::sqrt(dx * dx + dy * dy);
    if (disk_->smooth_edges) {
      const double w = 1.0 - smoothstep(d.dot_radius_px - 0.5, d.dot_radius_px + 0.5, dist);
      log_e = log_e * (1.0 - w) + d.contrast_log_e * w;
    } else if (dist <= d.dot_radius_px) {
      log_e = d.contrast_log_e;
    }
  }
  return log_e;
}

double Stimulus::frame_lux(int x, int y, double t) const {
  const auto& f = *frames_;
  const double pos = std::max(t, 0.0) * f.fps;
  const auto last = static_cast<double>(f.frames.size() - 1);
  const double clamped = std::min(pos, last);
  const auto i = static_cast<std::size_t>(std::floor(clamped));
  if (!f.interpolate || i + 1 >= f.frames.size()) return f.frames[i](y, x);
  const double u = clamped - static_cast<double>(i);
  return (1.0 - u) * f.frames[i](y, x) + u * f.frames[i + 1](y, x);
}

double Stimulus::sample(int x, int y, double t) const {
  if (x < 0 || y < 0 || x >= width_ || y >= height_ || !(t >= 0) || t > duration_) {
    throw Error(ErrorCode::OutOfBounds, "sample(" + std::to_string(x) + ", " + std::to_string(y) +
                                            ", " + std::to_string(t) + ") is outside the stimulus");
  }
  switch (kind_) {
    case StimulusKind::RotatingDisk:
      return base_lux_ * std::exp(disk_log(x, y, t));
    case StimulusKind::Frames:
      return frame_lux(x, y, t);
    default:
      return sample_uniform(t);
  }
}

void Stimulus::sample_row(int y, double t, std::span<double> out) const {
  switch (kind_) {
    case StimulusKind::RotatingDisk:
      for (int x = 0; x < width_; ++x) out[x] = base_lux_ * std::exp(disk_log(x, y, t));
      return;
    case StimulusKind::Frames:
      for (int x = 0; x < width_; ++x) out[x] = frame_lux(x, y, t);
      return;
    default:
      std::fill(out.begin(), out.end(), sample_uniform(t));
  }
}

bool Stimulus::spatially_uniform() const {
  return kind_ != StimulusKind::RotatingDisk && kind_ != StimulusKind::Frames;
}

double Stimulus::sample_uniform(double t) const {
  if (kind_ == StimulusKind::Constant) return base_lux_;
  return base_lux_ * std::exp(log_offset(t));
}

std::pair<double, double> Stimulus::lux_range() const {
  switch (kind_) {
    case StimulusKind::Constant:
      return {base_lux_, base_lux_};
    case StimulusKind::LogSine: {
      const double h = 0.5 * std::abs(sine_.contrast);
      return {base_lux_ * std::exp(-h), base_lux_ * std::exp(h)};
    }
    case StimulusKind::LogStep:
      return {base_lux_ * std::exp(std::min(0.0, step_.log_e_step)),
              base_lux_ * std::exp(std::max(0.0, step_.log_e_step))};
    case StimulusKind::LogRamp: {
      double lo = ramp_.knots.front().second, hi = lo;
      for (const auto& k : ramp_.knots) {
        lo = std::min(lo, k.second);
        hi = std::max(hi, k.second);
      }
      return {base_lux_ * std::exp(lo), base_lux_ * std::exp(hi)};
    }
    case StimulusKind::RotatingDisk: {
      double lo = 0, hi = 0;
      for (const Dot& d : disk_->dots) {
        lo = std::min(lo, d.contrast_log_e);
        hi = std::max(hi, d.contrast_log_e);
      }
      return {base_lux_ * std::exp(lo), base_lux_ * std::exp(hi)};
    }
    case StimulusKind::Frames: {
      double lo = frames_->frames.front().minCoeff(), hi = lo;
      for (const Frame& f : frames_->frames) {
        lo = std::min(lo, f.minCoeff());
        hi = std::max(hi, f.maxCoeff());
      }
      return {lo, hi};
    }
  }
  return {base_lux_, base_lux_};
}

Stimulus rotating_disk(int width, int height, double rpm, std::vector<Dot> dots, double base_lux,
                       double duration, bool smooth_edges) {
  if (!(rpm > 0) || !std::isfinite(rpm)) throw Error(ErrorCode::InvalidGeometry, "rpm must be positive");
  check_dims(width, height);
  // Every dot must stay inside the frame for the whole revolution.
  const double reach = 0.5 * (std::min(width, height) - 1) + 0.5;
  for (std::size_t i = 0; i < dots.size(); ++i) {
    const Dot& d = dots[i];
    if (!(d.radius_px >= 0) || !(d.dot_radius_px > 0) || !std::isfinite(d.contrast_log_e) ||
        !std::isfinite(d.angle_rad) || d.radius_px + d.dot_radius_px > reach) {
      throw Error(ErrorCode::InvalidGeometry, "dot " + std::to_string(i) + " does not fit in the " +
                                                  std::to_string(width) + "x" + std::to_string(height) +
                                                  " frame");
    }
  }
  Stimulus s(StimulusKind::RotatingDisk, width, height, duration, base_lux);
  s.disk_ = std::make_shared<const DiskSpec>(DiskSpec{rpm, std::move(dots), smooth_edges});
  return s;
}

Stimulus frames_stimulus(std::vector<Frame> frames_lux, double fps, bool interpolate) {
  if (frames_lux.empty()) throw Error(ErrorCode::BadFrameFormat, "no frames");
  if (!(fps > 0)) throw Error(ErrorCode::InvalidConfig, "fps must be positive");
  const auto rows = frames_lux.front().rows();
  const auto cols = frames_lux.front().cols();
  for (std::size_t i = 0; i < frames_lux.size(); ++i) {
    if (frames_lux[i].rows() != rows || frames_lux[i].cols() != cols) {
      throw Error(ErrorCode::InconsistentDimensions,
                  "frame " + std::to_string(i) + " is " + std::to_string(frames_lux[i].cols()) + "x" +
                      std::to_string(frames_lux[i].rows()) + ", expected " + std::to_string(cols) + "x" +
                      std::to_string(rows));
    }
    if (!(frames_lux[i] >= 0).all()) throw Error(ErrorCode::BadFrameFormat, "negative illuminance in frame");
  }
  const double duration = static_cast<double>(frames_lux.size()) / fps;
  Stimulus s(StimulusKind::Frames, static_cast<int>(cols), static_cast<int>(rows), duration, 0.0);
  s.frames_ = std::make_shared<const FramesSpec>(FramesSpec{std::move(frames_lux), fps, interpolate});
  return s;
}

Stimulus frames_stimulus(const std::filesystem::path& frame_dir_or_file, double fps, double lux_per_dn,
                         bool interpolate) {
  if (!(lux_per_dn >= 0)) throw Error(ErrorCode::InvalidConfig, "lux_per_dn must be non-negative");
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(frame_dir_or_file)) {
    for (const auto& entry : std::filesystem::directory_iterator(frame_dir_or_file)) {
      if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(frame_dir_or_file);
  }
  if (files.empty()) throw Error(ErrorCode::BadFrameFormat, "no .pgm files in " + frame_dir_or_file.string());

  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) {
    const GrayImage img = read_pgm(f);
    Frame lux(img.height, img.width);
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) lux(y, x) = img.at(x, y) * lux_per_dn;
    }
    frames.push_back(std::move(lux));
  }
  return frames_stimulus(std::move(frames), fps, interpolate);
}

}  // namespace evpix
