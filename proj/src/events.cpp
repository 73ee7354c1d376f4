#include "evpix/events.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "evpix/error.hpp"

namespace evpix {
namespace {

constexpr char kMagic[8] = {'E', 'V', 'P', 'X', '0', '0', '0', '1'};

template <typename T>
void put_le(char* dst, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
}

template <typename T>
T get_le(const char* src) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(src[i])) << (8 * i);
  return static_cast<T>(v);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

template <typename T>
bool parse_field(std::string_view s, T& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

void write_csv(std::ostream& out, const EventStream& stream) {
  out << "t_us,x,y,polarity\n";
  std::string line;
  for (const Event& e : stream.events) {
    line.clear();
    line += std::to_string(e.t_us);
    line += ',';
    line += std::to_string(e.x);
    line += ',';
    line += std::to_string(e.y);
    line += e.polarity == Polarity::On ? ",1\n" : ",-1\n";
    out << line;
  }
  if (!out) throw Error(ErrorCode::IoError, "CSV write failed");
}

void write_csv(const std::filesystem::path& path, const EventStream& stream) {
  auto out = open_out(path);
  write_csv(out, stream);
}

EventStream read_csv(std::istream& in, std::uint32_t width, std::uint32_t height) {
  EventStream s;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidConfig, "empty CSV event file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_us,x,y,polarity") throw Error(ErrorCode::InvalidConfig, "CSV header must be t_us,x,y,polarity");
  std::uint32_t max_x = 0, max_y = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<std::string_view, 4> f;
    std::string_view rest(line);
    for (int i = 0; i < 4; ++i) {
      const auto comma = rest.find(',');
      if ((i < 3) == (comma == std::string_view::npos)) {
        throw Error(ErrorCode::InvalidConfig, "CSV line " + std::to_string(lineno) + ": expected 4 fields");
      }
      f[i] = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    Event e;
    int pol = 0;
    if (!parse_field(f[0], e.t_us) || e.t_us < 0 || !parse_field(f[1], e.x) || !parse_field(f[2], e.y) ||
        !parse_field(f[3], pol) || (pol != 1 && pol != -1)) {
      throw Error(ErrorCode::InvalidConfig, "CSV line " + std::to_string(lineno) + ": bad event '" + line + "'");
    }
    e.polarity = pol == 1 ? Polarity::On : Polarity::Off;
    max_x = std::max<std::uint32_t>(max_x, e.x);
    max_y = std::max<std::uint32_t>(max_y, e.y);
    s.events.push_back(e);
  }
  s.width = width ? width : (s.events.empty() ? 0 : max_x + 1);
  s.height = height ? height : (s.events.empty() ? 0 : max_y + 1);
  return s;
}

EventStream read_csv(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height) {
  auto in = open_in(path);
  return read_csv(in, width, height);
}

void write_binary(std::ostream& out, const EventStream& stream) {
  char header[16];
  std::memcpy(header, kMagic, 8);
  put_le<std::uint32_t>(header + 8, stream.width);
  put_le<std::uint32_t>(header + 12, stream.height);
  out.write(header, sizeof header);

  std::vector<char> buf;
  buf.reserve(16 * 4096);
  auto flush = [&] {
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    buf.clear();
  };
  for (const Event& e : stream.events) {
    char rec[16] = {};
    put_le<std::uint64_t>(rec, static_cast<std::uint64_t>(e.t_us));
    put_le<std::uint16_t>(rec + 8, e.x);
    put_le<std::uint16_t>(rec + 10, e.y);
    rec[12] = static_cast<char>(static_cast<std::int8_t>(e.polarity));
    buf.insert(buf.end(), rec, rec + 16);
    if (buf.size() >= 16 * 4096) flush();
  }
  flush();
  if (!out) throw Error(ErrorCode::IoError, "binary event write failed");
}

void write_binary(const std::filesystem::path& path, const EventStream& stream) {
  auto out = open_out(path);
  write_binary(out, stream);
}

EventStream read_binary(std::istream& in) {
  char header[16];
  if (!in.read(header, sizeof header) || std::memcmp(header, kMagic, 8) != 0) {
    throw Error(ErrorCode::InvalidConfig, "not an EVPX0001 event file");
  }
  EventStream s;
  s.width = get_le<std::uint32_t>(header + 8);
  s.height = get_le<std::uint32_t>(header + 12);
  char rec[16];
  while (in.read(rec, sizeof rec)) {
    Event e;
    e.t_us = static_cast<std::int64_t>(get_le<std::uint64_t>(rec));
    e.x = get_le<std::uint16_t>(rec + 8);
    e.y = get_le<std::uint16_t>(rec + 10);
    const auto pol = static_cast<std::int8_t>(rec[12]);
    if (pol != 1 && pol != -1) throw Error(ErrorCode::InvalidConfig, "bad polarity byte in event record");
    e.polarity = static_cast<Polarity>(pol);
    s.events.push_back(e);
  }
  if (in.gcount() != 0) throw Error(ErrorCode::InvalidConfig, "truncated event record");
  return s;
}

EventStream read_binary(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_binary(in);
}

EventStream read_events(const std::filesystem::path& path) {
  auto in = open_in(path);
  char head[8] = {};
  in.read(head, 8);
  const bool binary = in.gcount() == 8 && std::memcmp(head, kMagic, 8) == 0;
  in.clear();
  in.seekg(0);
  return binary ? read_binary(in) : read_csv(in);
}

}  // namespace evpix
