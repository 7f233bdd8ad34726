#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sarmot/image.hpp"

using namespace sarmot;
namespace fs = std::filesystem;

namespace {

fs::path temp(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "sarmot_image_tests";
  fs::create_directories(d);
  return d / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

GrayImage ramp(int w, int h) {
  GrayImage g(w, h);
  for (int i = 0; i < w * h; ++i) g.pixels[i] = static_cast<std::uint8_t>((i * 37) % 256);
  return g;
}

}  // namespace

TEST(Netpbm, PgmRoundTrip) {
  const GrayImage g = ramp(7, 5);
  write_pgm(temp("a.pgm"), g);
  EXPECT_EQ(slurp(temp("a.pgm")).substr(0, 11), "P5\n7 5\n255\n");
  const GrayImage back = read_pgm(temp("a.pgm"));
  EXPECT_EQ(back.width, 7);
  EXPECT_EQ(back.pixels, g.pixels);
}

TEST(Netpbm, HeaderCommentsAndErrors) {
  {
    std::ofstream out(temp("c.pgm"), std::ios::binary);
    out << "P5\n# made by hand\n2 1\n255\n";
    out.put(static_cast<char>(9)).put(static_cast<char>(200));
  }
  const GrayImage g = read_pgm(temp("c.pgm"));
  EXPECT_EQ(g.at(1, 0), 200);
  {
    std::ofstream out(temp("t.pgm"), std::ios::binary);
    out << "P5\n4 4\n255\nab";
  }
  EXPECT_THROW(read_pgm(temp("t.pgm")), DataError);
  {
    std::ofstream out(temp("m.pgm"), std::ios::binary);
    out << "P5\n1 1\n65535\n\x01\x02";
  }
  EXPECT_THROW(read_pgm(temp("m.pgm")), DataError);
  EXPECT_THROW(read_ppm(temp("c.pgm")), DataError);
  EXPECT_THROW(read_pgm(temp("none.pgm")), DataError);
}

TEST(Convert, UnitAndMinMax) {
  FeatureMap m(1, 4, 1);
  m(0, 0, 0) = -1;
  m(0, 0, 1) = 0.5;
  m(0, 0, 2) = 1;
  m(0, 0, 3) = 3;
  const GrayImage u = to_gray_unit(m);
  EXPECT_EQ(u.pixels, (std::vector<std::uint8_t>{0, 128, 255, 255}));
  const GrayImage mm = to_gray_minmax(m);
  EXPECT_EQ(mm.pixels, (std::vector<std::uint8_t>{0, 96, 128, 255}));
  EXPECT_EQ(to_gray_minmax(FeatureMap(2, 2, 1, 4.0)).pixels, (std::vector<std::uint8_t>(4, 0)));
  const FeatureMap back = to_feature_map(u);
  EXPECT_DOUBLE_EQ(back(0, 0, 1), 128.0 / 255.0);
  EXPECT_THROW(to_gray_unit(m, 1), DataError);
}

TEST(IdColor, DeterministicAndBright) {
  for (int id = 0; id < 200; ++id) {
    const Rgb c = id_color(id);
    EXPECT_EQ(c, id_color(id));
    EXPECT_EQ(std::max({c.r, c.g, c.b}), 255);
  }
  EXPECT_FALSE(id_color(1) == id_color(2));
}

TEST(Render, NoBoxesCopiesCanvas) {
  const GrayImage g = ramp(6, 4);
  const RgbImage out = draw_boxes(g, {});
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 6; ++x) EXPECT_EQ(out.at(x, y), (Rgb{g.at(x, y), g.at(x, y), g.at(x, y)}));
  }
}

TEST(Render, GoldenEightByEight) {
  GrayImage canvas(8, 8, 100);
  const LabeledBox box{3, BBox(1.4, 2, 4.2, 3.6)};  // columns 1..5, rows 2..5
  render_frame(canvas, std::span<const LabeledBox>(&box, 1), temp("g.ppm"));

  const Rgb c = id_color(3);
  std::string golden = "P6\n8 8\n255\n";
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      const bool inside = x >= 1 && x <= 5 && y >= 2 && y <= 5;
      const bool edge = inside && (x == 1 || x == 5 || y == 2 || y == 5);
      const Rgb p = edge ? c : Rgb{100, 100, 100};
      golden += static_cast<char>(p.r);
      golden += static_cast<char>(p.g);
      golden += static_cast<char>(p.b);
    }
  }
  EXPECT_EQ(slurp(temp("g.ppm")), golden);
  const RgbImage back = read_ppm(temp("g.ppm"));
  EXPECT_EQ(back.at(1, 2), c);
  EXPECT_EQ(back.at(3, 3), (Rgb{100, 100, 100}));
}

TEST(Render, ClipsBoxesPartlyOutside) {
  const GrayImage canvas(5, 5, 0);
  const std::vector<LabeledBox> boxes{{9, BBox(-2, -2, 4, 4)}, {9, BBox(3, 3, 10, 10)}};
  const RgbImage out = draw_boxes(canvas, boxes);
  const Rgb c = id_color(9);
  EXPECT_EQ(out.at(1, 0), c);
  EXPECT_EQ(out.at(0, 1), c);
  EXPECT_EQ(out.at(1, 1), c);
  EXPECT_EQ(out.at(0, 0), (Rgb{}));
  EXPECT_EQ(out.at(3, 4), c);
  EXPECT_EQ(out.at(4, 4), (Rgb{}));
}
