#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace relexp {

using Rgb = std::array<float, 3>;

// Named colors of the blocksworld. Declaration order is the tie-break order
// used by nearest-color naming.
enum class Color { red, green, blue, cyan };

inline constexpr std::array<Color, 4> kColorPool = {Color::red, Color::green, Color::blue,
                                                   Color::cyan};

std::string_view color_name(Color c);
std::optional<Color> parse_color(std::string_view name);
// Reference channel vector, every channel in {0.0, 0.8}.
Rgb color_rgb(Color c);

inline constexpr Color kBackground = Color::red;

// Dense RGB raster, channels interleaved, row 0 at the top, values in [0,1].
class Image {
 public:
  Image() = default;
  Image(int width, int height);
  Image(int width, int height, Rgb fill);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  float& at(int x, int y, int c) { return data_[index(x, y, c)]; }
  float at(int x, int y, int c) const { return data_[index(x, y, c)]; }
  Rgb pixel(int x, int y) const;
  void set_pixel(int x, int y, Rgb v);
  void fill_rect(int x0, int y0, int w, int h, Rgb v);

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3 + c;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

// 8-bit RGB raster used for files and annotated output.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // RGB interleaved

  Raster() = default;
  Raster(int w, int h, std::array<std::uint8_t, 3> fill = {0, 0, 0});

  void set(int x, int y, std::array<std::uint8_t, 3> v);
  std::array<std::uint8_t, 3> get(int x, int y) const;
  bool operator==(const Raster&) const = default;
};

// Quantizes to 8 bits (0.8 maps to 204).
Raster to_raster(const Image& image);
Image from_raster(const Raster& raster);

// FNV-1a over the quantized pixels.
std::uint64_t digest(const Image& image);

double mean_squared_error(const Image& a, const Image& b);

}  // namespace relexp
