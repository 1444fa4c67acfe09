#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "relexp/common/error.hpp"
#include "relexp/percept/percept.hpp"
#include "relexp/worldgen/scene.hpp"
#include "support/oracles.hpp"

using namespace relexp;
using namespace relexp::percept;

namespace {

Image sample_image() {
  worldgen::Scene s;
  s.squares = {{Color::green, 2, 3}, {Color::blue, 5, 3}, {Color::cyan, 0, 7}};
  return worldgen::render(s);
}

}  // namespace

TEST(Segment, RegularGridRowMajor) {
  const auto cells = segment(sample_image());
  ASSERT_EQ(cells.size(), 64u);
  const auto& c = cells[26];
  EXPECT_EQ(c.id, 26);
  EXPECT_EQ(c.col, 2);
  EXPECT_EQ(c.row, 3);
  EXPECT_EQ(c.bounds, (PixelBounds{8, 12, 12, 16}));
  EXPECT_DOUBLE_EQ(c.center_x, 10.0);
  EXPECT_DOUBLE_EQ(c.center_y, 14.0);
  EXPECT_EQ(c.named_color, Color::green);
  EXPECT_EQ(cells[29].named_color, Color::blue);
  EXPECT_EQ(cells[56].named_color, Color::cyan);
  EXPECT_EQ(cells[0].named_color, Color::red);
  EXPECT_THROW(segment(Image(30, 32)), ConfigError);
}

TEST(NameColor, NearestWithEarlierPoolEntryOnTies) {
  EXPECT_EQ(name_color({0.1f, 0.7f, 0.1f}), Color::green);
  EXPECT_EQ(name_color({0.0f, 0.7f, 0.9f}), Color::cyan);
  EXPECT_EQ(name_color({0.7f, 0.1f, 0.0f}), Color::red);
  // exactly between red and green
  EXPECT_EQ(name_color({0.4f, 0.4f, 0.0f}), Color::red);
}

TEST(Attributes, BackgroundCellsCarryNone) {
  const auto cells = segment(sample_image());
  const std::vector<SuperPixel> sel = {cells[15], cells[26], cells[29]};
  const auto a = extract_attributes(sel);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0], (AttributeAtom{26, Color::green}));
  EXPECT_EQ(to_prolog(a[0]), "has_color(sp26, green).");
  AttributePool none;
  none.kinds.clear();
  EXPECT_TRUE(extract_attributes(sel, none).empty());
}

TEST(Relations, SimpleLeftOf) {
  const auto cells = segment(sample_image());
  const std::vector<SuperPixel> sel = {cells[26], cells[29]};
  const auto r = extract_relations(sel);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(to_prolog(r[0]), "left_of(sp26, sp29).");
  EXPECT_EQ(to_prolog(r[1]), "right_of(sp29, sp26).");
}

TEST(Relations, AdjacencyAndDiagonalTies) {
  const auto cells = segment(sample_image());
  const std::vector<SuperPixel> col = {cells[19], cells[27]};  // (3,2) above (3,3)
  const auto r = extract_relations(col);
  const std::set<RelationAtom> got(r.begin(), r.end());
  EXPECT_TRUE(got.count({Relation::top_of, 19, 27}));
  EXPECT_TRUE(got.count({Relation::on, 19, 27}));
  EXPECT_TRUE(got.count({Relation::under, 27, 19}));
  const std::vector<SuperPixel> diag = {cells[0], cells[9]};
  EXPECT_EQ(relations_between(cells[0], cells[9]), std::vector<Relation>{Relation::left_of});
  EXPECT_EQ(extract_relations(diag).size(), 2u);
}

TEST(Relations, DegenerateSelections) {
  const auto cells = segment(sample_image());
  EXPECT_TRUE(extract_relations(std::vector<SuperPixel>{cells[3]}).empty());
  EXPECT_THROW(extract_relations(std::vector<SuperPixel>{cells[3], cells[3]}), InvalidSelectionError);
}

TEST(Relations, AgreeWithBruteForceOnRandomSelections) {
  const auto r = fixtures::relation_trials(segment(sample_image()), 2024, 1000);
  EXPECT_EQ(r.mismatches, 0);
  EXPECT_EQ(r.violations, 0);
}

TEST(Relations, HoldsMatchesExtraction) {
  const auto cells = segment(sample_image());
  for (int a = 0; a < 64; a += 3)
    for (int b = 0; b < 64; b += 5) {
      if (a == b) continue;
      for (Relation r : kRelationPool) {
        const auto rs = relations_between(cells[static_cast<std::size_t>(a)], cells[static_cast<std::size_t>(b)]);
        const bool extracted = std::find(rs.begin(), rs.end(), r) != rs.end();
        EXPECT_EQ(holds(r, a % 8, a / 8, b % 8, b / 8), extracted);
      }
    }
}

TEST(Relations, NamesRoundTrip) {
  for (Relation r : kRelationPool) {
    EXPECT_EQ(parse_relation(relation_name(r)), r);
    EXPECT_EQ(inverse(inverse(r)), r);
  }
  EXPECT_FALSE(parse_relation("near"));
}
