#include <gtest/gtest.h>

#include <cmath>

#include "relexp/common/error.hpp"
#include "relexp/percept/percept.hpp"
#include "relexp/surrogate/surrogate.hpp"
#include "relexp/worldgen/scene.hpp"
#include "support/planted.hpp"

using namespace relexp;
using namespace relexp::surrogate;

namespace {

Image two_squares() {
  worldgen::Scene s;
  s.squares = {{Color::green, 2, 3}, {Color::blue, 5, 3}};
  return worldgen::render(s);
}

BatchPredictor constant(double v) {
  return [v](std::span<const Image> batch) { return std::vector<double>(batch.size(), v); };
}

// fraction of non-background pixels as a smooth stand-in classifier
BatchPredictor coverage() {
  return [](std::span<const Image> batch) {
    std::vector<double> out;
    for (const auto& img : batch) {
      int n = 0;
      for (const auto& cell : percept::segment(img)) n += cell.named_color != Color::red;
      out.push_back(n / 2.0);
    }
    return out;
  };
}

SurrogateFit fit_with(std::vector<double> w) {
  SurrogateFit f;
  f.coefficients = std::move(w);
  return f;
}

}  // namespace

TEST(SwitchOff, AllOnIsIdentityAllOffIsBackground) {
  const Image img = two_squares();
  const auto cells = percept::segment(img);
  EXPECT_EQ(switch_off(img, cells, Mask::all_on(64)), img);
  const Image off = switch_off(img, cells, Mask{std::vector<bool>(64, false)});
  for (const auto& c : percept::segment(off)) EXPECT_EQ(c.named_color, Color::red);
  Mask m = Mask::all_on(64);
  m.bits[0] = false;  // background cell, nothing changes
  EXPECT_EQ(switch_off(img, cells, m), img);
}

TEST(Locality, WeightDecreasesAlongNestedMasks) {
  worldgen::Scene s;
  s.squares = {{Color::green, 0, 0}, {Color::blue, 3, 3}, {Color::cyan, 6, 6}};
  const Image img = worldgen::render(s);
  const auto cells = percept::segment(img);
  EXPECT_DOUBLE_EQ(locality_weight(img, img), 1.0);
  Mask m = Mask::all_on(64);
  double prev = 1.0;
  for (int id : {0, 27, 54}) {
    m.bits[id] = false;
    const double w = locality_weight(img, switch_off(img, cells, m));
    EXPECT_LT(w, prev);
    EXPECT_GT(w, 0.0);
    prev = w;
  }
  Mask one = Mask::all_on(64);
  one.bits[0] = false;
  const double mse = 16.0 * (0.8 * 0.8 + 0.8 * 0.8) / (32 * 32 * 3);
  EXPECT_NEAR(locality_weight(img, switch_off(img, cells, one)), std::exp(-mse / (0.25 * 0.25)), 1e-6);
}

TEST(Pool, SizeAllOnEntryAndDeterminism) {
  const Image img = two_squares();
  const auto cells = percept::segment(img);
  const auto p = sample_pool(constant(0.7), img, cells, 1, 5);
  ASSERT_EQ(p.entries.size(), 2u);
  EXPECT_EQ(p.entries[0].mask, Mask::all_on(64));
  EXPECT_DOUBLE_EQ(p.entries[0].weight, 1.0);
  const auto a = sample_pool(coverage(), img, cells, 50, 9);
  const auto b = sample_pool(coverage(), img, cells, 50, 9);
  EXPECT_EQ(pool_to_csv(a), pool_to_csv(b));
  for (const auto& e : a.entries) {
    EXPECT_GT(e.weight, 0.0);
    EXPECT_LE(e.weight, 1.0);
  }
  EXPECT_THROW(sample_pool(constant(0.5), img, cells, 0, 1), ConfigError);
}

TEST(Pool, OnFractionNearHalf) {
  const Image img = two_squares();
  const auto cells = percept::segment(img);
  const auto p = sample_pool(constant(0.5), img, cells, 10000, 3);
  std::size_t on = 0, total = 0;
  for (std::size_t i = 1; i < p.entries.size(); ++i) {
    on += p.entries[i].mask.count_on();
    total += p.entries[i].mask.size();
  }
  EXPECT_NEAR(static_cast<double>(on) / total, 0.5, 0.02);
}

TEST(KLasso, PlantedSupportRecovered) {
  int recovered = 0;
  for (int t = 0; t < 100; ++t) {
    const auto planted = fixtures::planted_pool(derive_seed(2024, {static_cast<std::uint64_t>(t)}));
    const auto fit = fit_k_lasso(planted.pool, 3);
    recovered += fit.support == planted.support;
  }
  EXPECT_GE(recovered, 95);
}

TEST(KLasso, RestrictedFitMatchesNormalEquations) {
  const auto planted = fixtures::planted_pool(77, 64, 3, 400, 0.05);
  const auto design = design_from_pool(planted.pool);
  for (const std::vector<int>& support : {planted.support, std::vector<int>{1, 5, 9, 40, 63}, std::vector<int>{}}) {
    const auto wls = weighted_least_squares(design, support);
    const auto oracle = fixtures::normal_equations(design, support);
    EXPECT_NEAR(wls.intercept, oracle[0], 1e-8);
    for (std::size_t j = 0; j < support.size(); ++j) EXPECT_NEAR(wls.coefficients[support[j]], oracle[j + 1], 1e-8);
  }
  const auto fit = fit_k_lasso(planted.pool, 3);
  const auto oracle = fixtures::normal_equations(design, fit.support);
  EXPECT_NEAR(fit.intercept, oracle[0], 1e-8);
  EXPECT_NEAR(fit.loss, surrogate_loss(design, fit.coefficients, fit.intercept), 1e-12);
  EXPECT_GE(fit.loss, 0.0);
}

TEST(KLasso, FullSupportEqualsPlainLeastSquares) {
  const auto planted = fixtures::planted_pool(5, 64, 3, 300, 0.05);
  const auto design = design_from_pool(planted.pool);
  const auto fit = fit_k_lasso(planted.pool, 64);
  std::vector<int> all(64);
  for (int i = 0; i < 64; ++i) all[i] = i;
  const auto wls = weighted_least_squares(design, all);
  EXPECT_NEAR(fit.intercept, wls.intercept, 1e-8);
  for (int i = 0; i < 64; ++i) EXPECT_NEAR(fit.coefficients[i], wls.coefficients[i], 1e-8);
}

TEST(KLasso, SupportSizeAndExactZeros) {
  const auto planted = fixtures::planted_pool(8, 64, 6, 500, 0.02);
  for (int k : {1, 2, 4, 6}) {
    const auto fit = fit_k_lasso(planted.pool, k);
    EXPECT_LE(static_cast<int>(fit.support.size()), k);
    for (int i = 0; i < 64; ++i) {
      if (std::find(fit.support.begin(), fit.support.end(), i) == fit.support.end()) {
        EXPECT_EQ(fit.coefficients[i], 0.0);
      }
    }
  }
}

TEST(KLasso, PathNonzerosNonIncreasingInLambda) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto planted = fixtures::planted_pool(seed, 20, 5, 200, 0.1);
    const auto design = design_from_pool(planted.pool);
    const double top = lambda_max(design);
    std::vector<double> lambdas;
    for (int i = 0; i <= 30; ++i) lambdas.push_back(top * std::pow(0.8, i));
    const auto path = lasso_path(design, lambdas);
    EXPECT_EQ(path.front().nonzeros, 0);
    for (std::size_t i = 1; i < path.size(); ++i) EXPECT_GE(path[i].nonzeros, path[i - 1].nonzeros);
  }
}

TEST(KLasso, DegeneratePoolFlagged) {
  const Image img = two_squares();
  const auto pool = sample_pool(constant(0.9), img, percept::segment(img), 40, 1);
  const auto fit = fit_k_lasso(pool, 6);
  EXPECT_TRUE(fit.degenerate);
  EXPECT_TRUE(fit.support.empty());
}

TEST(SelectTopK, SignedMagnitudeAndTies) {
  std::vector<double> w(64, 0.0);
  w[0] = 0.9;
  w[1] = -0.5;
  w[2] = 0.3;
  EXPECT_EQ(select_top_k(fit_with(w), 2), (std::vector<int>{0, 2}));
  EXPECT_EQ(select_top_k(fit_with(w), 2, SelectionMode::absolute_weight), (std::vector<int>{0, 1}));
  EXPECT_EQ(select_top_k(fit_with(std::vector<double>(64, 0.4)), 3), (std::vector<int>{0, 1, 2}));
  EXPECT_THROW(select_top_k(fit_with(w), 65), ConfigError);
}
