#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relexp/common/image.hpp"

namespace relexp::worldgen {

inline constexpr int kGridSize = 8;
inline constexpr int kCellPixels = 4;
inline constexpr int kImageSize = kGridSize * kCellPixels;

enum class ConceptId { single_relation, tower };

std::string_view concept_name(ConceptId id);
std::optional<ConceptId> parse_concept(std::string_view name);

struct Square {
  Color color = Color::green;
  int col = 0;
  int row = 0;
  bool operator==(const Square&) const = default;
  auto operator<=>(const Square&) const = default;
};

struct Scene {
  std::vector<Square> squares;
  bool label = false;
  ConceptId concept_id = ConceptId::single_relation;
  bool operator==(const Scene&) const = default;
};

// Throws InvalidSceneError on overlapping cells, repeated colors, cells
// outside the grid or a background-colored square.
void validate(const Scene& scene);

// Background (0.8, 0, 0); each square fills its 4x4 cell, cell (c, r)
// covering pixel columns 4c..4c+3 and rows 4r..4r+3.
Image render(const Scene& scene);

// Pixel-scan inverse of render: one square per cell whose pixels all carry a
// single non-background reference color. Sorted by (row, col).
std::vector<Square> extract_squares(const Image& image);

// Symbolic concept membership on grid coordinates.
bool single_relation_holds(const Scene& scene);
bool tower_holds(const Scene& scene);
bool concept_holds(ConceptId id, const Scene& scene);

std::string describe(const Scene& scene);

}  // namespace relexp::worldgen
