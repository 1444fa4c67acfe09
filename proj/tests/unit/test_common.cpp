#include <gtest/gtest.h>

#include <filesystem>

#include "relexp/common/error.hpp"
#include "relexp/common/image.hpp"
#include "relexp/common/png_io.hpp"
#include "relexp/common/rng.hpp"

using namespace relexp;

TEST(Image, FillAndPixel) {
  Image img(4, 3, color_rgb(Color::red));
  img.fill_rect(1, 1, 2, 1, color_rgb(Color::cyan));
  EXPECT_EQ(img.pixel(0, 0), color_rgb(Color::red));
  EXPECT_EQ(img.pixel(2, 1), color_rgb(Color::cyan));
  EXPECT_EQ(img.pixel(2, 2), color_rgb(Color::red));
}

TEST(Image, ColorNamesRoundTrip) {
  for (Color c : kColorPool) EXPECT_EQ(parse_color(color_name(c)), c);
  EXPECT_FALSE(parse_color("purple"));
}

TEST(Raster, QuantizesPointEightTo204) {
  const Image img(2, 2, color_rgb(Color::green));
  const Raster r = to_raster(img);
  EXPECT_EQ(r.get(1, 1), (std::array<std::uint8_t, 3>{0, 204, 0}));
  EXPECT_EQ(to_raster(from_raster(r)), r);
}

TEST(Png, EncodeDecodeRoundTrip) {
  Image img(32, 32, color_rgb(Color::red));
  img.fill_rect(8, 12, 4, 4, color_rgb(Color::blue));
  const Raster r = to_raster(img);
  const auto bytes = encode_png(r);
  ASSERT_GT(bytes.size(), 8u);
  EXPECT_EQ(bytes[1], 'P');
  EXPECT_EQ(decode_png(bytes), r);
  EXPECT_EQ(encode_png(r), bytes);  // deterministic
}

TEST(Png, FileRoundTripAndMissingFile) {
  const auto dir = std::filesystem::temp_directory_path() / "relexp_png_test";
  std::filesystem::create_directories(dir);
  const Raster r(5, 7, {1, 2, 3});
  write_png(dir / "a.png", r);
  EXPECT_EQ(read_png(dir / "a.png"), r);
  EXPECT_THROW(read_png(dir / "missing.png"), IoError);
  EXPECT_THROW(decode_png({1, 2, 3}), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Metrics, SwitchedOffGreenCellMse) {
  Image a(32, 32, color_rgb(Color::red));
  a.fill_rect(8, 8, 4, 4, color_rgb(Color::green));
  const Image b(32, 32, color_rgb(Color::red));
  // 16 pixels differ by 0.8 in two channels
  const double expected = 16.0 * (0.64 + 0.64) / (32.0 * 32.0 * 3.0);
  EXPECT_NEAR(mean_squared_error(a, b), expected, 1e-7);
  EXPECT_NEAR(expected, 0.00667, 1e-5);
  EXPECT_EQ(mean_squared_error(a, a), 0.0);
}

TEST(Digest, DistinguishesImages) {
  Image a(8, 8, color_rgb(Color::red));
  Image b = a;
  EXPECT_EQ(digest(a), digest(b));
  b.set_pixel(3, 3, color_rgb(Color::blue));
  EXPECT_NE(digest(a), digest(b));
}

TEST(Rng, DerivedSeedsAreDistinctAndStable) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {0}), derive_seed(2, {0}));
  Rng rng(5);
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 30000; ++i) ++counts[uniform_index(rng, 3)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(Errors, ParseErrorFormatsPosition) {
  const ParseError e(3, 14, "expected '.'");
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.column(), 14);
  EXPECT_NE(std::string(e.what()).find("line 3, column 14"), std::string::npos);
}
