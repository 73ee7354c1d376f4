#pragma once

#include "evpix/events.hpp"
#include "evpix/pgm.hpp"

namespace evpix {

struct RenderResult {
  GrayImage image;
  bool empty_window = false;  ///< no events fell in the window; the image is uniform gray
};

/// Signed event sum per pixel over [t0, t0 + window), mapped to
/// 128 + clamp(sum, +-full_scale) * 127 / full_scale. ON brightens.
/// Throws InvalidConfig unless window > 0 and full_scale >= 1.
RenderResult render_accumulation(const EventStream& stream, double t0, double window, int full_scale);

}  // namespace evpix
