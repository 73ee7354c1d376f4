#include "evpix/render.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "evpix/error.hpp"

namespace evpix {

RenderResult render_accumulation(const EventStream& stream, double t0, double window, int full_scale) {
  if (!(window > 0)) throw Error(ErrorCode::InvalidConfig, "render window must be positive");
  if (full_scale < 1) throw Error(ErrorCode::InvalidConfig, "full scale must be at least 1 event");

  // Window edges in whole microseconds, matching the event timestamps.
  const auto begin = static_cast<std::int64_t>(std::ceil(t0 * 1e6 - 1e-6));
  const auto end = static_cast<std::int64_t>(std::ceil((t0 + window) * 1e6 - 1e-6));

  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> sum =
      Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(stream.height, stream.width);
  bool any = false;
  for (const Event& e : stream.events) {
    if (e.t_us < begin || e.t_us >= end) continue;
    if (e.x >= stream.width || e.y >= stream.height) {
      throw Error(ErrorCode::OutOfBounds, "event outside the sensor");
    }
    sum(e.y, e.x) += static_cast<int>(e.polarity);
    any = true;
  }

  RenderResult out;
  out.empty_window = !any;
  out.image.width = static_cast<int>(stream.width);
  out.image.height = static_cast<int>(stream.height);
  out.image.maxval = 255;
  out.image.pixels.resize(static_cast<std::size_t>(sum.size()));
  const double gain = 127.0 / full_scale;
  for (Eigen::Index i = 0; i < sum.size(); ++i) {
    const int s = std::clamp(sum.data()[i], -full_scale, full_scale);
    out.image.pixels[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(std::lround(128 + s * gain));
  }
  return out;
}

}  // namespace evpix
