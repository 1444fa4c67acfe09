#include "relexp/percept/percept.hpp"

#include <algorithm>
#include <cmath>

#include "relexp/common/error.hpp"

namespace relexp::percept {

std::vector<SuperPixel> segment(const Image& image, int cell_size) {
  if (cell_size <= 0 || image.width() % cell_size != 0 || image.height() % cell_size != 0) {
    throw ConfigError("image size " + std::to_string(image.width()) + "x" +
                      std::to_string(image.height()) + " is not divisible by cell size " +
                      std::to_string(cell_size));
  }
  const int cols = image.width() / cell_size;
  const int rows = image.height() / cell_size;
  std::vector<SuperPixel> cells;
  cells.reserve(static_cast<std::size_t>(cols) * rows);
  const double area = static_cast<double>(cell_size) * cell_size;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      SuperPixel sp;
      sp.id = r * cols + c;
      sp.col = c;
      sp.row = r;
      sp.bounds = {c * cell_size, r * cell_size, (c + 1) * cell_size, (r + 1) * cell_size};
      sp.center_x = 0.5 * (sp.bounds.x0 + sp.bounds.x1);
      sp.center_y = 0.5 * (sp.bounds.y0 + sp.bounds.y1);
      double sum[3] = {0.0, 0.0, 0.0};
      for (int y = sp.bounds.y0; y < sp.bounds.y1; ++y) {
        for (int x = sp.bounds.x0; x < sp.bounds.x1; ++x) {
          for (int ch = 0; ch < 3; ++ch) sum[ch] += image.at(x, y, ch);
        }
      }
      for (int ch = 0; ch < 3; ++ch) sp.mean_color[ch] = static_cast<float>(sum[ch] / area);
      sp.named_color = name_color(sp.mean_color);
      cells.push_back(sp);
    }
  }
  return cells;
}

Color name_color(const Rgb& rgb) {
  Color best = kColorPool.front();
  double best_dist = INFINITY;
  for (Color c : kColorPool) {
    const Rgb ref = color_rgb(c);
    double d = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
      const double diff = static_cast<double>(rgb[ch]) - static_cast<double>(ref[ch]);
      d += diff * diff;
    }
    if (d < best_dist) {
      best_dist = d;
      best = c;
    }
  }
  return best;
}

std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::left_of:
      return "left_of";
    case Relation::right_of:
      return "right_of";
    case Relation::top_of:
      return "top_of";
    case Relation::bottom_of:
      return "bottom_of";
    case Relation::on:
      return "on";
    case Relation::under:
      return "under";
  }
  return "unknown";
}

std::optional<Relation> parse_relation(std::string_view name) {
  for (Relation r : kRelationPool) {
    if (relation_name(r) == name) return r;
  }
  return std::nullopt;
}

Relation inverse(Relation r) {
  switch (r) {
    case Relation::left_of:
      return Relation::right_of;
    case Relation::right_of:
      return Relation::left_of;
    case Relation::top_of:
      return Relation::bottom_of;
    case Relation::bottom_of:
      return Relation::top_of;
    case Relation::on:
      return Relation::under;
    case Relation::under:
      return Relation::on;
  }
  return r;
}

std::vector<AttributeAtom> extract_attributes(std::span<const SuperPixel> selection,
                                              const AttributePool& pool) {
  std::vector<AttributeAtom> atoms;
  const bool color_enabled =
      std::find(pool.kinds.begin(), pool.kinds.end(), AttributeKind::color) != pool.kinds.end();
  if (!color_enabled) return atoms;
  for (const auto& sp : selection) {
    if (std::find(pool.colors.begin(), pool.colors.end(), sp.named_color) == pool.colors.end()) {
      continue;
    }
    atoms.push_back({sp.id, sp.named_color});
  }
  return atoms;
}

namespace {

// Diagonal ties (|dx| == |dy|) count as horizontal.
std::optional<Relation> directional(double dx, double dy) {
  if (dx == 0.0 && dy == 0.0) return std::nullopt;
  if (std::abs(dx) >= std::abs(dy)) return dx < 0.0 ? Relation::left_of : Relation::right_of;
  return dy < 0.0 ? Relation::top_of : Relation::bottom_of;
}

}  // namespace

std::vector<Relation> relations_between(const SuperPixel& a, const SuperPixel& b) {
  std::vector<Relation> out;
  const auto dir = directional(a.center_x - b.center_x, a.center_y - b.center_y);
  if (!dir) throw InvalidSelectionError("super-pixels share a center");
  out.push_back(*dir);
  if (a.col == b.col) {
    if (a.row == b.row - 1) out.push_back(Relation::on);
    if (a.row == b.row + 1) out.push_back(Relation::under);
  }
  return out;
}

std::vector<RelationAtom> extract_relations(std::span<const SuperPixel> selection) {
  std::vector<RelationAtom> atoms;
  for (std::size_t i = 0; i < selection.size(); ++i) {
    for (std::size_t j = 0; j < selection.size(); ++j) {
      if (i == j) continue;
      if (selection[i].id == selection[j].id) {
        throw InvalidSelectionError("selection contains super-pixel " +
                                    std::to_string(selection[i].id) + " twice");
      }
      for (Relation r : relations_between(selection[i], selection[j])) {
        atoms.push_back({r, selection[i].id, selection[j].id});
      }
    }
  }
  return atoms;
}

bool holds(Relation r, int col_a, int row_a, int col_b, int row_b, int cell_size) {
  const double dx = static_cast<double>(col_a - col_b) * cell_size;
  const double dy = static_cast<double>(row_a - row_b) * cell_size;
  switch (r) {
    case Relation::on:
      return col_a == col_b && row_a == row_b - 1;
    case Relation::under:
      return col_a == col_b && row_a == row_b + 1;
    default:
      return directional(dx, dy) == r;
  }
}

std::string default_constant(int id) { return "sp" + std::to_string(id); }

std::string to_prolog(const AttributeAtom& atom, const ConstantNamer& name) {
  return "has_color(" + name(atom.subject) + ", " + std::string(color_name(atom.value)) + ").";
}

std::string to_prolog(const RelationAtom& atom, const ConstantNamer& name) {
  return std::string(relation_name(atom.predicate)) + "(" + name(atom.subject) + ", " +
         name(atom.object) + ").";
}

}  // namespace relexp::percept
