#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sarmot/core.hpp"
#include "sarmot/grid.hpp"

namespace sarmot {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0);
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, interleaved RGB

  RgbImage() = default;
  RgbImage(int w, int h);
  explicit RgbImage(const GrayImage& g);
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
};

/// Binary 8-bit PGM (P5). Comments in the header are skipped.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);
/// Binary 8-bit PPM (P6).
RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbImage& img);

/// Single-channel map -> 8-bit image, linear min-max stretch (flat maps -> 0).
GrayImage to_gray_minmax(const FeatureMap& m, int channel = 0);
/// Single-channel map -> 8-bit image, clamp(v, 0, 1) * 255 rounded.
GrayImage to_gray_unit(const FeatureMap& m, int channel = 0);
/// 8-bit image -> one-channel map with values v / 255.
FeatureMap to_feature_map(const GrayImage& img);

/// Deterministic bright color per track id.
Rgb id_color(int id);

struct LabeledBox {
  int id = 0;
  BBox bbox;
};

/// 1-pixel outline of each box in its id color; columns round(x) ..
/// round(x + w) - 1, rows likewise, clipped to the canvas.
RgbImage draw_boxes(const GrayImage& canvas, std::span<const LabeledBox> boxes);
void render_frame(const GrayImage& canvas, std::span<const LabeledBox> boxes,
                  const std::filesystem::path& path);

}  // namespace sarmot
