#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relexp/common/image.hpp"

namespace relexp::percept {

inline constexpr int kCellSize = 4;

// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct PixelBounds {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  bool operator==(const PixelBounds&) const = default;
};

struct SuperPixel {
  int id = 0;
  int col = 0;
  int row = 0;
  PixelBounds bounds;
  double center_x = 0.0;
  double center_y = 0.0;
  Rgb mean_color{0.0f, 0.0f, 0.0f};
  Color named_color = kBackground;

  bool operator==(const SuperPixel&) const = default;
};

// Regular grid segmentation, row-major ids starting at 0.
std::vector<SuperPixel> segment(const Image& image, int cell_size = kCellSize);

// Nearest entry of the color pool by Euclidean distance; ties go to the
// earlier pool entry.
Color name_color(const Rgb& rgb);

enum class Relation { left_of, right_of, top_of, bottom_of, on, under };

inline constexpr std::array<Relation, 6> kRelationPool = {
    Relation::left_of, Relation::right_of, Relation::top_of,
    Relation::bottom_of, Relation::on, Relation::under};

std::string_view relation_name(Relation r);
std::optional<Relation> parse_relation(std::string_view name);
Relation inverse(Relation r);

// has_color(subject, value)
struct AttributeAtom {
  int subject = 0;
  Color value = kBackground;
  bool operator==(const AttributeAtom&) const = default;
  auto operator<=>(const AttributeAtom&) const = default;
};

struct RelationAtom {
  Relation predicate = Relation::left_of;
  int subject = 0;
  int object = 0;
  bool operator==(const RelationAtom&) const = default;
  auto operator<=>(const RelationAtom&) const = default;
};

// Attribute kinds the extractor knows about. Only color is emitted by
// default; size and location exist as pool entries for other domains.
enum class AttributeKind { color, size, location };

struct AttributePool {
  std::vector<AttributeKind> kinds{AttributeKind::color};
  std::vector<Color> colors{Color::cyan, Color::green, Color::blue};
};

std::vector<AttributeAtom> extract_attributes(std::span<const SuperPixel> selection,
                                              const AttributePool& pool = {});

// Relations pairwise over the selection, in selection order (i outer, j
// inner), directional relation first and adjacency second per pair.
std::vector<RelationAtom> extract_relations(std::span<const SuperPixel> selection);

// Relations that hold for a single ordered pair of cell centers / grid
// coordinates; the building block of extract_relations.
std::vector<Relation> relations_between(const SuperPixel& a, const SuperPixel& b);

// Grid-level predicate used by the dataset generator.
bool holds(Relation r, int col_a, int row_a, int col_b, int row_b, int cell_size = kCellSize);

using ConstantNamer = std::function<std::string(int)>;
std::string default_constant(int id);  // "sp26"

std::string to_prolog(const AttributeAtom& atom, const ConstantNamer& name = default_constant);
std::string to_prolog(const RelationAtom& atom, const ConstantNamer& name = default_constant);

}  // namespace relexp::percept
