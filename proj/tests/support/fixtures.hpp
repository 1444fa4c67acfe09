#pragma once

#include <algorithm>
#include <vector>

#include "relexp/percept/percept.hpp"
#include "relexp/pipeline/pipeline.hpp"
#include "relexp/worldgen/scene.hpp"

namespace relexp::fixtures {

// Predictor that answers with the ground-truth concept of the rendered scene.
inline surrogate::BatchPredictor truth_predictor(worldgen::ConceptId concept_id) {
  return [concept_id](std::span<const Image> batch) {
    std::vector<double> out;
    for (const Image& img : batch) {
      worldgen::Scene s;
      s.concept_id = concept_id;
      s.squares = worldgen::extract_squares(img);
      out.push_back(worldgen::concept_holds(concept_id, s) ? 1.0 : 0.0);
    }
    return out;
  };
}

struct Fixture {
  Image image;
  std::vector<percept::SuperPixel> selection;
  std::vector<pipeline::LogicalExample> examples;
  ilp::Program program;
};

inline Fixture build_fixture(const worldgen::Scene& scene, std::vector<int> cells) {
  Fixture f;
  f.image = worldgen::render(scene);
  const auto all = percept::segment(f.image);
  std::sort(cells.begin(), cells.end());
  for (int id : cells) f.selection.push_back(all[static_cast<std::size_t>(id)]);
  const auto attrs = percept::extract_attributes(f.selection);
  const auto rels = percept::extract_relations(f.selection);
  f.examples = pipeline::perturb_relations(f.image, truth_predictor(scene.concept_id), f.selection, attrs, rels,
                                           0.8, 1.0);
  f.program = pipeline::to_program(f.examples);
  return f;
}

inline int cell(int col, int row) { return row * 8 + col; }

// Green (2,3) left of blue (5,3) plus one background cell (7,1).
inline Fixture exp1_fixture() {
  worldgen::Scene s;
  s.concept_id = worldgen::ConceptId::single_relation;
  s.squares = {{Color::green, 2, 3}, {Color::blue, 5, 3}};
  return build_fixture(s, {cell(2, 3), cell(5, 3), cell(7, 1)});
}

// Green on cyan on blue in column 3.
inline Fixture tower_fixture() {
  worldgen::Scene s;
  s.concept_id = worldgen::ConceptId::tower;
  s.squares = {{Color::green, 3, 2}, {Color::cyan, 3, 3}, {Color::blue, 3, 4}};
  return build_fixture(s, {cell(3, 2), cell(3, 3), cell(3, 4)});
}

}  // namespace relexp::fixtures
