#include "evpix/pgm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "evpix/error.hpp"

namespace evpix {
namespace {

[[noreturn]] void bad(const std::filesystem::path& path, const std::string& why) {
  throw Error(ErrorCode::BadFrameFormat, path.string() + ": " + why);
}

// Header tokens are separated by whitespace; '#' starts a comment that runs to
// the end of the line.
long read_header_int(const std::vector<char>& buf, std::size_t& pos, const std::filesystem::path& path) {
  while (pos < buf.size()) {
    const unsigned char c = static_cast<unsigned char>(buf[pos]);
    if (c == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else if (std::isspace(c)) {
      ++pos;
    } else {
      break;
    }
  }
  long value = 0;
  std::size_t digits = 0;
  while (pos < buf.size() && std::isdigit(static_cast<unsigned char>(buf[pos]))) {
    value = value * 10 + (buf[pos] - '0');
    if (value > 1'000'000) bad(path, "header value too large");
    ++pos;
    ++digits;
  }
  if (digits == 0) bad(path, "malformed header");
  return value;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '5') bad(path, "not a binary PGM (P5)");

  std::size_t pos = 2;
  GrayImage img;
  img.width = static_cast<int>(read_header_int(buf, pos, path));
  img.height = static_cast<int>(read_header_int(buf, pos, path));
  img.maxval = static_cast<int>(read_header_int(buf, pos, path));
  if (img.width <= 0 || img.height <= 0) bad(path, "empty image");
  if (img.maxval <= 0 || img.maxval > 65535) bad(path, "maxval must be in 1..65535");
  if (pos >= buf.size() || !std::isspace(static_cast<unsigned char>(buf[pos]))) bad(path, "malformed header");
  ++pos;

  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  const std::size_t bytes = img.maxval < 256 ? 1 : 2;
  if (buf.size() - pos < n * bytes) bad(path, "truncated pixel data");
  img.pixels.resize(n);
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data() + pos);
  for (std::size_t i = 0; i < n; ++i) {
    img.pixels[i] = bytes == 1 ? p[i] : static_cast<std::uint16_t>(p[2 * i] << 8 | p[2 * i + 1]);
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "P5\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
  if (image.maxval < 256) {
    for (auto v : image.pixels) out.put(static_cast<char>(v));
  } else {
    for (auto v : image.pixels) {
      out.put(static_cast<char>(v >> 8));
      out.put(static_cast<char>(v & 0xff));
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

}  // namespace evpix
