#include <gtest/gtest.h>

#include <algorithm>

#include "relexp/common/error.hpp"
#include "relexp/pipeline/pipeline.hpp"
#include "support/fixtures.hpp"
#include "support/sideeffect.hpp"

using namespace relexp;
using namespace relexp::pipeline;
using percept::Relation;
using percept::RelationAtom;

namespace {

std::vector<percept::SuperPixel> pick(const Image& img, std::vector<int> ids) {
  const auto cells = percept::segment(img);
  std::vector<percept::SuperPixel> out;
  for (int id : ids) out.push_back(cells[static_cast<std::size_t>(id)]);
  return out;
}

// answers with a fixed score per call index: first the original image is not
// asked, flipped images get scores in order
surrogate::BatchPredictor scripted(std::vector<double> scores) {
  return [scores](std::span<const Image> batch) {
    return std::vector<double>(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(batch.size()));
  };
}

}  // namespace

TEST(Flip, InvolutionAndBackgroundNoop) {
  const auto f = fixtures::exp1_fixture();
  const auto& s = f.selection;
  const Image once = flip_in_image(f.image, s[0], s[1]);
  EXPECT_NE(once, f.image);
  EXPECT_EQ(flip_in_image(once, s[0], s[1]), f.image);
  const auto bg = pick(f.image, {0, 1});
  EXPECT_EQ(flip_in_image(f.image, bg[0], bg[1]), f.image);
}

TEST(Flip, GreenBlueSwapTurnsLeftIntoRight) {
  const auto f = fixtures::exp1_fixture();
  const int g = fixtures::cell(2, 3), b = fixtures::cell(5, 3);
  const auto after = relations_after_flip(f.selection, g, b);
  EXPECT_NE(std::find(after.begin(), after.end(), RelationAtom{Relation::right_of, g, b}), after.end());
  EXPECT_EQ(std::find(after.begin(), after.end(), RelationAtom{Relation::left_of, g, b}), after.end());
  const auto moved = swap_positions(f.selection, g, b);
  const auto mg = std::find_if(moved.begin(), moved.end(), [&](const auto& c) { return c.id == g; });
  EXPECT_EQ(mg->col, 5);
  EXPECT_EQ(mg->row, 3);
}

TEST(SideEffects, SymbolicMatchesPixelExtraction) {
  int flips = 0, bad = 0;
  for (std::uint64_t t = 0; t < 60; ++t) {
    const auto r = fixtures::side_effect_run(derive_seed(99, {t}));
    flips += r.flips;
    bad += r.disagreements;
  }
  EXPECT_GT(flips, 60);
  EXPECT_EQ(bad, 0);
}

TEST(Perturb, OneExamplePerRelationPlusOriginal) {
  const auto f = fixtures::exp1_fixture();
  const auto rels = percept::extract_relations(f.selection);
  ASSERT_EQ(f.examples.size(), rels.size() + 1);
  EXPECT_EQ(f.examples[0].constant, "e1");
  EXPECT_FALSE(f.examples[0].flipped.has_value());
  for (std::size_t i = 1; i < f.examples.size(); ++i) {
    EXPECT_EQ(f.examples[i].constant, "e" + std::to_string(i + 1));
    EXPECT_EQ(*f.examples[i].flipped, rels[i - 1]);
  }
  int pos = 0;
  for (const auto& e : f.examples) pos += e.polarity == Polarity::positive;
  EXPECT_EQ(pos, 3);
  EXPECT_EQ(f.examples.size() - pos, 4u);
}

TEST(Perturb, ThetaMonotone) {
  const auto f = fixtures::exp1_fixture();
  const auto attrs = percept::extract_attributes(f.selection);
  const auto rels = percept::extract_relations(f.selection);
  std::vector<double> scores;
  for (std::size_t i = 0; i < rels.size(); ++i) scores.push_back(0.1 + 0.15 * i);
  int prev = 1000;
  for (double theta : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    const auto ex = perturb_relations(f.image, scripted(scores), f.selection, attrs, rels, theta, 0.95);
    int pos = 0;
    for (const auto& e : ex) pos += e.polarity == Polarity::positive;
    EXPECT_LE(pos, prev);
    prev = pos;
  }
}

TEST(Perturb, EmptyRelationsRejected) {
  const auto f = fixtures::exp1_fixture();
  const std::vector<percept::SuperPixel> one = {f.selection[0]};
  EXPECT_THROW(perturb_relations(f.image, scripted({}), one, {}, {}, 0.8, 1.0), InvalidSelectionError);
}

TEST(Program, TextLayout) {
  const auto f = fixtures::exp1_fixture();
  const std::string text = ilp::to_text(f.program);
  EXPECT_NE(text.find("concept(e1)."), std::string::npos);
  EXPECT_NE(text.find("contains(sp26_e1, e1)."), std::string::npos);
  EXPECT_NE(text.find("contains(sp15_e1, e1)."), std::string::npos);
  EXPECT_NE(text.find("has_color(sp26_e1, green)."), std::string::npos);
  EXPECT_NE(text.find("left_of(sp26_e1, sp29_e1)."), std::string::npos);
  EXPECT_EQ(text.find("has_color(sp15"), std::string::npos);
  EXPECT_EQ(block_constant(26, "e3"), "sp26_e3");
}

TEST(Explain, BelowThresholdAborts) {
  const auto f = fixtures::exp1_fixture();
  ExplainConfig cfg;
  cfg.n_samples = 20;
  auto low = [](std::span<const Image> batch) { return std::vector<double>(batch.size(), 0.3); };
  try {
    explain(f.image, low, cfg);
    FAIL();
  } catch (const BelowThresholdError& e) {
    EXPECT_DOUBLE_EQ(e.estimate(), 0.3);
  }
}

TEST(Explain, TruthPredictorEndToEnd) {
  worldgen::Scene s;
  s.concept_id = worldgen::ConceptId::single_relation;
  s.squares = {{Color::green, 1, 2}, {Color::blue, 6, 2}};
  ExplainConfig cfg;
  cfg.n_samples = 300;
  cfg.seed = 4;
  const auto run = explain(worldgen::render(s), fixtures::truth_predictor(s.concept_id), cfg);
  ASSERT_EQ(run.selection.size(), 3u);
  const auto sel = run.selected_cells();
  EXPECT_TRUE(std::is_sorted(sel.begin(), sel.end(), [](const auto& a, const auto& b) { return a.id < b.id; }));
  EXPECT_NE(std::find(run.selection.begin(), run.selection.end(), fixtures::cell(1, 2)), run.selection.end());
  EXPECT_NE(std::find(run.selection.begin(), run.selection.end(), fixtures::cell(6, 2)), run.selection.end());
  EXPECT_EQ(run.positives() + run.negatives(), static_cast<int>(run.examples.size()));
  EXPECT_FALSE(run.theory.clauses.empty());
  const auto b = explain(worldgen::render(s), fixtures::truth_predictor(s.concept_id), cfg);
  EXPECT_EQ(ilp::to_text(run.theory), ilp::to_text(b.theory));
}

TEST(Explain, ConfigValidation) {
  ExplainConfig cfg;
  cfg.k = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.theta = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.n_samples = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_EQ(ExplainConfig{}.effective_lasso_k(), 6);
}
