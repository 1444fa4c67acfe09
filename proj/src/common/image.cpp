#include "relexp/common/image.hpp"

#include <cmath>

#include "relexp/common/error.hpp"

namespace relexp {

std::string_view color_name(Color c) {
  switch (c) {
    case Color::red:
      return "red";
    case Color::green:
      return "green";
    case Color::blue:
      return "blue";
    case Color::cyan:
      return "cyan";
  }
  return "unknown";
}

std::optional<Color> parse_color(std::string_view name) {
  for (Color c : kColorPool) {
    if (color_name(c) == name) return c;
  }
  return std::nullopt;
}

Rgb color_rgb(Color c) {
  switch (c) {
    case Color::red:
      return {0.8f, 0.0f, 0.0f};
    case Color::green:
      return {0.0f, 0.8f, 0.0f};
    case Color::blue:
      return {0.0f, 0.0f, 0.8f};
    case Color::cyan:
      return {0.0f, 0.8f, 0.8f};
  }
  return {0.0f, 0.0f, 0.0f};
}

Image::Image(int width, int height) : Image(width, height, Rgb{0.0f, 0.0f, 0.0f}) {}

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw ConfigError("image dimensions must be positive");
  data_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill[0];
    data_[i + 1] = fill[1];
    data_[i + 2] = fill[2];
  }
}

Rgb Image::pixel(int x, int y) const {
  const auto i = index(x, y, 0);
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void Image::set_pixel(int x, int y, Rgb v) {
  const auto i = index(x, y, 0);
  data_[i] = v[0];
  data_[i + 1] = v[1];
  data_[i + 2] = v[2];
}

void Image::fill_rect(int x0, int y0, int w, int h, Rgb v) {
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) set_pixel(x, y, v);
  }
}

Raster::Raster(int w, int h, std::array<std::uint8_t, 3> fill) : width(w), height(h) {
  pixels.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill[0];
    pixels[i + 1] = fill[1];
    pixels[i + 2] = fill[2];
  }
}

void Raster::set(int x, int y, std::array<std::uint8_t, 3> v) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
  pixels[i] = v[0];
  pixels[i + 1] = v[1];
  pixels[i + 2] = v[2];
}

std::array<std::uint8_t, 3> Raster::get(int x, int y) const {
  const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

namespace {

std::uint8_t quantize(float v) {
  const float clamped = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0f));
}

}  // namespace

Raster to_raster(const Image& image) {
  Raster r(image.width(), image.height());
  const auto src = image.data();
  for (std::size_t i = 0; i < src.size(); ++i) r.pixels[i] = quantize(src[i]);
  return r;
}

Image from_raster(const Raster& raster) {
  Image img(raster.width, raster.height);
  auto dst = img.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<float>(raster.pixels[i]) / 255.0f;
  return img;
}

std::uint64_t digest(const Image& image) {
  std::uint64_t h = 1469598103934665603ull;
  for (float v : image.data()) {
    h ^= quantize(v);
    h *= 1099511628211ull;
  }
  return h;
}

double mean_squared_error(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ConfigError("mean_squared_error: image dimensions differ");
  }
  const auto da = a.data();
  const auto db = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = static_cast<double>(da[i]) - static_cast<double>(db[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(da.size());
}

}  // namespace relexp
