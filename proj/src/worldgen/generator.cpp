#include "relexp/worldgen/generator.hpp"

#include <algorithm>
#include <array>

#include "relexp/common/error.hpp"
#include "relexp/common/rng.hpp"

namespace relexp::worldgen {

namespace {

// Distinct uniformly drawn cells for the given colors.
Scene place_uniform(Rng& rng, std::span<const Color> colors, ConceptId concept_id) {
  Scene s;
  s.concept_id = concept_id;
  for (Color c : colors) {
    for (;;) {
      const int cell = uniform_index(rng, kGridSize * kGridSize);
      const int col = cell % kGridSize;
      const int row = cell / kGridSize;
      const bool taken = std::any_of(s.squares.begin(), s.squares.end(), [&](const Square& q) {
        return q.col == col && q.row == row;
      });
      if (!taken) {
        s.squares.push_back({c, col, row});
        break;
      }
    }
  }
  return s;
}

}  // namespace

Scene gen_single_relation(std::uint64_t seed, bool positive) {
  Rng rng(seed);
  constexpr std::array<Color, 2> colors = {Color::green, Color::blue};
  for (;;) {
    Scene s = place_uniform(rng, colors, ConceptId::single_relation);
    if (single_relation_holds(s) == positive) {
      s.label = positive;
      return s;
    }
  }
}

Scene gen_tower(std::uint64_t seed, bool positive) {
  Rng rng(seed);
  if (positive) {
    const int col = uniform_index(rng, kGridSize);
    const int row = 2 + uniform_index(rng, kGridSize - 2);
    const bool cyan_middle = uniform_index(rng, 2) == 1;
    Scene s;
    s.concept_id = ConceptId::tower;
    s.label = true;
    s.squares = {{Color::blue, col, row},
                 {cyan_middle ? Color::cyan : Color::green, col, row - 1},
                 {cyan_middle ? Color::green : Color::cyan, col, row - 2}};
    return s;
  }
  if (uniform_index(rng, 2) == 0) {
    // Broken tower: contiguous column stack in one of the four orders that
    // do not put blue at the bottom.
    static constexpr std::array<std::array<Color, 3>, 4> kBroken = {{
        {Color::cyan, Color::blue, Color::green},
        {Color::cyan, Color::green, Color::blue},
        {Color::green, Color::blue, Color::cyan},
        {Color::green, Color::cyan, Color::blue},
    }};
    const auto& order = kBroken[static_cast<std::size_t>(uniform_index(rng, 4))];
    const int col = uniform_index(rng, kGridSize);
    const int bottom = 2 + uniform_index(rng, kGridSize - 2);
    Scene s;
    s.concept_id = ConceptId::tower;
    s.label = false;
    // order lists colors bottom to top
    for (int i = 0; i < 3; ++i) s.squares.push_back({order[static_cast<std::size_t>(i)], col, bottom - i});
    if (tower_holds(s)) throw InvalidSceneError("broken tower generator produced a tower");
    return s;
  }
  constexpr std::array<Color, 3> colors = {Color::blue, Color::green, Color::cyan};
  for (;;) {
    Scene s = place_uniform(rng, colors, ConceptId::tower);
    if (!tower_holds(s)) {
      s.label = false;
      return s;
    }
  }
}

Scene generate(ConceptId concept_id, std::uint64_t seed, bool positive) {
  return concept_id == ConceptId::single_relation ? gen_single_relation(seed, positive)
                                               : gen_tower(seed, positive);
}

}  // namespace relexp::worldgen
