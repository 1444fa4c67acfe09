#include "relexp/explain/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "relexp/common/error.hpp"
#include "relexp/explain/font.hpp"
#include "relexp/percept/percept.hpp"

namespace relexp::explain {

namespace {

using Px = std::array<std::uint8_t, 3>;

constexpr Px kBand{24, 24, 24};
constexpr Px kText{255, 255, 255};
constexpr Px kEdge{255, 255, 255};
constexpr Px kLabelBox{0, 0, 0};

int text_scale(int scale) { return std::max(1, scale / 5); }

std::vector<std::string> wrap(const std::string& text, std::size_t max_chars) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string word, line;
  while (in >> word) {
    if (!line.empty() && line.size() + 1 + word.size() > max_chars) {
      lines.push_back(line);
      line.clear();
    }
    line += (line.empty() ? "" : " ") + word;
  }
  if (!line.empty()) lines.push_back(line);
  return lines;
}

std::size_t chars_per_line(int width, int ts) {
  return static_cast<std::size_t>(std::max(1, (width - 2 * ts) / ((kGlyphWidth + 1) * ts)));
}

void fill_box(Raster& r, int x0, int y0, int x1, int y1, Px c) {
  for (int y = std::max(0, y0); y < std::min(r.height, y1); ++y)
    for (int x = std::max(0, x0); x < std::min(r.width, x1); ++x) r.set(x, y, c);
}

void draw_line(Raster& r, int x0, int y0, int x1, int y1, int radius, Px c) {
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    fill_box(r, x0 - radius, y0 - radius, x0 + radius + 1, y0 + radius + 1, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void boxed_text(Raster& r, int cx, int cy, const std::string& text, int ts, Px fg) {
  const int w = text_width(text, ts) - ts;
  const int h = kGlyphHeight * ts;
  const int x = cx - w / 2, y = cy - h / 2;
  fill_box(r, x - ts, y - ts, x + w + ts, y + h + ts, kLabelBox);
  draw_text(r, x, y, text, ts, fg);
}

}  // namespace

int caption_height(const std::string& caption, int width, int scale) {
  const int ts = text_scale(scale);
  const auto lines = wrap(caption, chars_per_line(width, ts));
  if (lines.empty()) return 0;
  return static_cast<int>(lines.size()) * (kGlyphHeight + 3) * ts + 3 * ts;
}

Raster render_annotated(const Image& image, const Annotation& annotation, int scale) {
  if (scale < kMinScale) throw ConfigError("render scale must be at least " + std::to_string(kMinScale));
  const int w = image.width() * scale;
  const int img_h = image.height() * scale;
  const int band = caption_height(annotation.caption, w, scale);
  Raster out(w, img_h + band, kBand);

  const Raster src = to_raster(image);
  for (int y = 0; y < img_h; ++y)
    for (int x = 0; x < w; ++x) out.set(x, y, src.get(x / scale, y / scale));

  const auto cells = percept::segment(image);
  auto find = [&](int id) -> const percept::SuperPixel& {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const percept::SuperPixel& s) { return s.id == id; });
    if (it == cells.end()) throw InvalidSelectionError("annotation refers to unknown super-pixel " + std::to_string(id));
    return *it;
  };
  auto center = [&](int id) {
    const auto& s = find(id);
    return std::pair<int, int>{static_cast<int>(std::lround(s.center_x * scale)),
                               static_cast<int>(std::lround(s.center_y * scale))};
  };
  const int ts = text_scale(scale);

  for (const Edge& e : annotation.edges) {
    auto [x0, y0] = center(e.from);
    auto [x1, y1] = center(e.to);
    draw_line(out, x0, y0, x1, y1, std::max(0, scale / 10), kEdge);
  }
  for (const Highlight& h : annotation.highlights) {
    const auto& b = find(h.cell).bounds;
    const int x0 = b.x0 * scale, y0 = b.y0 * scale, x1 = b.x1 * scale, y1 = b.y1 * scale;
    fill_box(out, x0, y0, x1, y0 + scale, h.outline);
    fill_box(out, x0, y1 - scale, x1, y1, h.outline);
    fill_box(out, x0, y0, x0 + scale, y1, h.outline);
    fill_box(out, x1 - scale, y0, x1, y1, h.outline);
  }
  for (const Edge& e : annotation.edges) {
    auto [x0, y0] = center(e.from);
    auto [x1, y1] = center(e.to);
    boxed_text(out, (x0 + x1) / 2, (y0 + y1) / 2, e.relation, ts, kText);
  }
  for (const Highlight& h : annotation.highlights) {
    auto [cx, cy] = center(h.cell);
    boxed_text(out, cx, cy, h.label, ts, h.outline);
  }

  const auto lines = wrap(annotation.caption, chars_per_line(w, ts));
  for (std::size_t i = 0; i < lines.size(); ++i)
    draw_text(out, 2 * ts, img_h + 2 * ts + static_cast<int>(i) * (kGlyphHeight + 3) * ts, lines[i], ts, kText);
  return out;
}

}  // namespace relexp::explain
