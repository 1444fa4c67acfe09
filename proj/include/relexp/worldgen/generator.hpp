#pragma once

#include <cstdint>

#include "relexp/worldgen/scene.hpp"

namespace relexp::worldgen {

// Green and blue placed uniformly; rejection sampling until left_of(green,
// blue) holds (positive) or fails (negative).
Scene gen_single_relation(std::uint64_t seed, bool positive);

// Positive: blue foundation at (c, r), r >= 2, with cyan and green stacked in
// either order above it. Negative: half broken towers (contiguous column,
// blue not at the bottom), half uniform placements that miss the concept.
Scene gen_tower(std::uint64_t seed, bool positive);

Scene generate(ConceptId concept_id, std::uint64_t seed, bool positive);

}  // namespace relexp::worldgen
