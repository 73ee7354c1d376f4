#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace evpix {

/// Grayscale image as read from or written to a binary PGM.
struct GrayImage {
  int width = 0;
  int height = 0;
  int maxval = 255;                  ///< 255 for 8-bit, up to 65535 for 16-bit
  std::vector<std::uint16_t> pixels; ///< row-major

  std::uint16_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Reads a P5 file. Throws BadFrameFormat on anything else.
GrayImage read_pgm(const std::filesystem::path& path);

/// Writes a P5 file; 16-bit samples are big-endian as the format requires.
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

}  // namespace evpix
