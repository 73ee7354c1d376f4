#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "evpix/pixel.hpp"

namespace evpix {

struct EventStream {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<Event> events;

  bool operator==(const EventStream&) const = default;
};

/// Global output order: time, then row, then column, ON before OFF.
inline bool event_order(const Event& a, const Event& b) {
  if (a.t_us != b.t_us) return a.t_us < b.t_us;
  if (a.y != b.y) return a.y < b.y;
  if (a.x != b.x) return a.x < b.x;
  return a.polarity > b.polarity;
}

// CSV: header "t_us,x,y,polarity", polarity 1 or -1. The CSV form has no
// place for the sensor size, so read_csv() sizes the stream from the largest
// coordinates it sees unless width/height are given.
void write_csv(std::ostream& out, const EventStream& stream);
void write_csv(const std::filesystem::path& path, const EventStream& stream);
EventStream read_csv(std::istream& in, std::uint32_t width = 0, std::uint32_t height = 0);
EventStream read_csv(const std::filesystem::path& path, std::uint32_t width = 0, std::uint32_t height = 0);

// Binary: "EVPX0001", u32 width, u32 height, then 16-byte little-endian
// records (u64 t_us, u16 x, u16 y, i8 polarity, 3 zero bytes).
void write_binary(std::ostream& out, const EventStream& stream);
void write_binary(const std::filesystem::path& path, const EventStream& stream);
EventStream read_binary(std::istream& in);
EventStream read_binary(const std::filesystem::path& path);

/// Picks the reader from the first bytes of the file.
EventStream read_events(const std::filesystem::path& path);

}  // namespace evpix
