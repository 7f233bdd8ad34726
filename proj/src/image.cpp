#include "sarmot/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <cctype>
#include <string>

namespace sarmot {

GrayImage::GrayImage(int w, int h, std::uint8_t fill) : width(w), height(h) {
  if (w < 1 || h < 1) throw DataError("image dimensions must be positive");
  pixels.assign(static_cast<std::size_t>(w) * h, fill);
}

RgbImage::RgbImage(int w, int h) : width(w), height(h) {
  if (w < 1 || h < 1) throw DataError("image dimensions must be positive");
  pixels.assign(static_cast<std::size_t>(w) * h * 3, 0);
}

RgbImage::RgbImage(const GrayImage& g) : RgbImage(g.width, g.height) {
  for (std::size_t i = 0; i < g.pixels.size(); ++i) {
    pixels[3 * i] = pixels[3 * i + 1] = pixels[3 * i + 2] = g.pixels[i];
  }
}

Rgb RgbImage::at(int x, int y) const {
  const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void RgbImage::set(int x, int y, Rgb c) {
  const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
  pixels[i] = c.r;
  pixels[i + 1] = c.g;
  pixels[i + 2] = c.b;
}

namespace {

struct NetpbmHeader {
  int width = 0;
  int height = 0;
};

int header_int(std::istream& in, const std::string& src) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  long v = -1;
  if (!(in >> v) || v < 1 || v > 1 << 20) throw DataError(src + ": bad netpbm header");
  return static_cast<int>(v);
}

NetpbmHeader read_header(std::istream& in, const char* magic, const std::string& src) {
  char m[2] = {};
  if (!in.read(m, 2) || m[0] != magic[0] || m[1] != magic[1]) {
    throw DataError(src + ": expected " + std::string(magic, 2) + " image");
  }
  NetpbmHeader h;
  h.width = header_int(in, src);
  h.height = header_int(in, src);
  if (header_int(in, src) != 255) throw DataError(src + ": only maxval 255 is supported");
  const int c = in.get();
  if (c == EOF || !std::isspace(c)) throw DataError(src + ": malformed netpbm header");
  return h;
}

void read_payload(std::istream& in, std::vector<std::uint8_t>& px, const std::string& src) {
  if (!in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()))) {
    throw DataError(src + ": truncated image data");
  }
}

void write_netpbm(const std::filesystem::path& path, const char* magic, int w, int h,
                  const std::vector<std::uint8_t>& px) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << magic << '\n' << w << ' ' << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const auto h = read_header(in, "P5", path.string());
  GrayImage img(h.width, h.height);
  read_payload(in, img.pixels, path.string());
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  write_netpbm(path, "P5", img.width, img.height, img.pixels);
}

RgbImage read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const auto h = read_header(in, "P6", path.string());
  RgbImage img(h.width, h.height);
  read_payload(in, img.pixels, path.string());
  return img;
}

void write_ppm(const std::filesystem::path& path, const RgbImage& img) {
  write_netpbm(path, "P6", img.width, img.height, img.pixels);
}

GrayImage to_gray_minmax(const FeatureMap& m, int channel) {
  if (channel < 0 || channel >= m.channels()) throw DataError("channel out of range");
  const auto p = m.plane(channel);
  const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
  GrayImage img(m.width(), m.height());
  const double span = *hi - *lo;
  if (!(span > 0.0)) return img;
  for (std::size_t i = 0; i < p.size(); ++i) img.pixels[i] = to_byte((p[i] - *lo) / span * 255.0);
  return img;
}

GrayImage to_gray_unit(const FeatureMap& m, int channel) {
  if (channel < 0 || channel >= m.channels()) throw DataError("channel out of range");
  const auto p = m.plane(channel);
  GrayImage img(m.width(), m.height());
  for (std::size_t i = 0; i < p.size(); ++i) img.pixels[i] = to_byte(std::clamp(p[i], 0.0, 1.0) * 255.0);
  return img;
}

FeatureMap to_feature_map(const GrayImage& img) {
  FeatureMap m(img.height, img.width, 1);
  auto v = m.values();
  for (std::size_t i = 0; i < img.pixels.size(); ++i) v[i] = img.pixels[i] / 255.0;
  return m;
}

Rgb id_color(int id) {
  std::uint32_t h = static_cast<std::uint32_t>(id) * 2654435761u;
  h ^= h >> 15;
  h *= 2246822519u;
  h ^= h >> 13;
  // one channel saturated, one floored, one free
  const std::uint8_t free = static_cast<std::uint8_t>(64 + (h >> 8) % 192);
  switch (h % 6) {
    case 0: return {255, free, 40};
    case 1: return {free, 255, 40};
    case 2: return {40, free, 255};
    case 3: return {255, 40, free};
    case 4: return {free, 40, 255};
    default: return {40, 255, free};
  }
}

RgbImage draw_boxes(const GrayImage& canvas, std::span<const LabeledBox> boxes) {
  RgbImage out(canvas);
  for (const auto& lb : boxes) {
    const Rgb c = id_color(lb.id);
    const long x0 = std::lround(lb.bbox.x);
    const long x1 = std::lround(lb.bbox.x + lb.bbox.w) - 1;
    const long y0 = std::lround(lb.bbox.y);
    const long y1 = std::lround(lb.bbox.y + lb.bbox.h) - 1;
    if (x1 < x0 || y1 < y0) continue;
    const auto plot = [&](long x, long y) {
      if (x >= 0 && y >= 0 && x < out.width && y < out.height) {
        out.set(static_cast<int>(x), static_cast<int>(y), c);
      }
    };
    for (long x = std::max(x0, -1L); x <= std::min(x1, static_cast<long>(out.width)); ++x) {
      plot(x, y0);
      plot(x, y1);
    }
    for (long y = std::max(y0, -1L); y <= std::min(y1, static_cast<long>(out.height)); ++y) {
      plot(x0, y);
      plot(x1, y);
    }
  }
  return out;
}

void render_frame(const GrayImage& canvas, std::span<const LabeledBox> boxes,
                  const std::filesystem::path& path) {
  write_ppm(path, draw_boxes(canvas, boxes));
}

}  // namespace sarmot
