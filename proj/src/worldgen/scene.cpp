#include "relexp/worldgen/scene.hpp"

#include <algorithm>
#include <set>

#include "relexp/common/error.hpp"
#include "relexp/percept/percept.hpp"

namespace relexp::worldgen {

std::string_view concept_name(ConceptId id) {
  switch (id) {
    case ConceptId::single_relation:
      return "single-relation";
    case ConceptId::tower:
      return "tower";
  }
  return "unknown";
}

std::optional<ConceptId> parse_concept(std::string_view name) {
  if (name == "single-relation") return ConceptId::single_relation;
  if (name == "tower") return ConceptId::tower;
  return std::nullopt;
}

void validate(const Scene& scene) {
  std::set<std::pair<int, int>> cells;
  std::set<Color> colors;
  for (const auto& sq : scene.squares) {
    if (sq.col < 0 || sq.col >= kGridSize || sq.row < 0 || sq.row >= kGridSize) {
      throw InvalidSceneError("square outside the grid at (" + std::to_string(sq.col) + "," +
                              std::to_string(sq.row) + ")");
    }
    if (sq.color == kBackground) throw InvalidSceneError("square colored like the background");
    if (!cells.insert({sq.col, sq.row}).second) {
      throw InvalidSceneError("overlapping squares at (" + std::to_string(sq.col) + "," +
                              std::to_string(sq.row) + ")");
    }
    if (!colors.insert(sq.color).second) {
      throw InvalidSceneError("color " + std::string(color_name(sq.color)) + " used twice");
    }
  }
}

Image render(const Scene& scene) {
  validate(scene);
  Image img(kImageSize, kImageSize, color_rgb(kBackground));
  for (const auto& sq : scene.squares) {
    img.fill_rect(sq.col * kCellPixels, sq.row * kCellPixels, kCellPixels, kCellPixels,
                  color_rgb(sq.color));
  }
  return img;
}

std::vector<Square> extract_squares(const Image& image) {
  std::vector<Square> out;
  const int cols = image.width() / kCellPixels;
  const int rows = image.height() / kCellPixels;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Rgb first = image.pixel(c * kCellPixels, r * kCellPixels);
      bool uniform = true;
      for (int y = 0; y < kCellPixels && uniform; ++y) {
        for (int x = 0; x < kCellPixels && uniform; ++x) {
          uniform = image.pixel(c * kCellPixels + x, r * kCellPixels + y) == first;
        }
      }
      if (!uniform) continue;
      for (Color color : kColorPool) {
        if (color != kBackground && color_rgb(color) == first) out.push_back({color, c, r});
      }
    }
  }
  return out;
}

namespace {

const Square* find_color(const Scene& scene, Color c) {
  for (const auto& sq : scene.squares) {
    if (sq.color == c) return &sq;
  }
  return nullptr;
}

bool on(const Square& a, const Square& b) {
  return percept::holds(percept::Relation::on, a.col, a.row, b.col, b.row);
}

}  // namespace

bool single_relation_holds(const Scene& scene) {
  const Square* g = find_color(scene, Color::green);
  const Square* b = find_color(scene, Color::blue);
  return g && b && percept::holds(percept::Relation::left_of, g->col, g->row, b->col, b->row);
}

bool tower_holds(const Scene& scene) {
  const Square* base = find_color(scene, Color::blue);
  const Square* cyan = find_color(scene, Color::cyan);
  const Square* green = find_color(scene, Color::green);
  if (!base || !cyan || !green) return false;
  return (on(*green, *base) && on(*cyan, *green)) || (on(*cyan, *base) && on(*green, *cyan));
}

bool concept_holds(ConceptId id, const Scene& scene) {
  return id == ConceptId::single_relation ? single_relation_holds(scene) : tower_holds(scene);
}

std::string describe(const Scene& scene) {
  std::string s;
  for (const auto& sq : scene.squares) {
    if (!s.empty()) s += " ";
    s += std::string(color_name(sq.color)) + "@" + std::to_string(sq.col) + "," +
         std::to_string(sq.row);
  }
  return s;
}

}  // namespace relexp::worldgen
