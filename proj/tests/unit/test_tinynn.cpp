#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "relexp/common/error.hpp"
#include "relexp/common/png_io.hpp"
#include "relexp/tinynn/classifier.hpp"
#include "relexp/tinynn/model_io.hpp"
#include "relexp/tinynn/network.hpp"
#include "relexp/tinynn/training.hpp"
#include "relexp/worldgen/dataset.hpp"
#include "support/gradcheck.hpp"

using namespace relexp;
using namespace relexp::tinynn;

TEST(Architecture, DerivedSizes) {
  const Architecture a;
  EXPECT_EQ(a.conv1_height(), 31);
  EXPECT_EQ(a.conv2_height(), 30);
  EXPECT_EQ(a.flat_size(), 30 * 30 * 16);
  const Architecture r = reduced_architecture();
  EXPECT_EQ(r.height, 8);
  EXPECT_EQ(r.conv1_filters, 4);
  EXPECT_EQ(r.dense1, 16);
  EXPECT_EQ(r.dense2, 8);
  Architecture bad;
  bad.kernel = 40;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Network, ParameterCount) {
  const auto p = NetworkParams<float>::he_uniform(Architecture{}, 1);
  const std::size_t expected = (12 * 16 + 16) + (64 * 16 + 16) + (14400 * 256 + 256) + (256 * 128 + 128) + (128 * 2 + 2);
  EXPECT_EQ(p.parameter_count(), expected);
  EXPECT_TRUE(p.all_finite());
}

TEST(Network, ProbabilitiesSumToOne) {
  const auto p = NetworkParams<double>::he_uniform(reduced_architecture(), 3);
  Matrix<double> x = Matrix<double>::Constant(4, p.arch.input_size(), 0.5);
  const auto probs = forward<double>(p, x, false, {}, nullptr, nullptr);
  ASSERT_EQ(probs.rows(), 4);
  for (int r = 0; r < 4; ++r) EXPECT_NEAR(probs.row(r).sum(), 1.0, 1e-12);
}

TEST(Network, GradientMatchesFiniteDifferences) {
  const auto g = fixtures::gradient_check(5);
  EXPECT_EQ(g.parameters, NetworkParams<double>::zeros(reduced_architecture()).parameter_count());
  EXPECT_GT(g.nonzero, g.parameters / 4);
  EXPECT_LE(g.max_relative_error, 1e-4);
}

TEST(Network, DropoutOnlyWhenTraining) {
  const auto p = NetworkParams<double>::he_uniform(reduced_architecture(), 3);
  Matrix<double> x = Matrix<double>::Constant(2, p.arch.input_size(), 0.3);
  const auto a = forward<double>(p, x, false, {}, nullptr, nullptr);
  const auto b = forward<double>(p, x, false, {}, nullptr, nullptr);
  EXPECT_EQ(a, b);
  Rng rng(1);
  ForwardCache<double> cache;
  forward<double>(p, x, true, {}, &rng, &cache);
  EXPECT_EQ(cache.mask1.size(), cache.relu1.size());
}

TEST(Classifier, BatchMatchesSingleAndThreads) {
  const Classifier clf(NetworkParams<float>::he_uniform(Architecture{}, 2));
  const auto d = worldgen::build_dataset(worldgen::ConceptId::single_relation, {2, 2, 70}, 1);
  std::vector<Image> images;
  for (const auto& item : d.test) images.push_back(item.image);
  const auto one = clf.predict_batch(images, 1);
  const auto three = clf.predict_batch(images, 3);
  ASSERT_EQ(one.size(), images.size());
  EXPECT_EQ(one, three);
  EXPECT_NEAR(one[5], clf.predict(images[5]), 1e-6);
}

TEST(ModelIo, RoundTripAndHeader) {
  const auto p = NetworkParams<float>::he_uniform(reduced_architecture(), 9);
  const auto bytes = encode_params(p);
  ASSERT_EQ(bytes.size(), 16 + 4 * p.parameter_count());
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 8), "RELEXPNN");
  EXPECT_EQ(bytes[8], 1);
  const auto back = decode_params(bytes, p.arch);
  EXPECT_EQ(encode_params(back), bytes);
  auto broken = bytes;
  broken[0] = 'X';
  EXPECT_THROW(decode_params(broken, p.arch), IoError);
  broken = bytes;
  broken.pop_back();
  EXPECT_THROW(decode_params(broken, p.arch), IoError);
}

TEST(Training, ZeroEpochsReturnsInitialization) {
  const auto d = worldgen::build_dataset(worldgen::ConceptId::single_relation, {8, 4, 4}, 1);
  TrainConfig cfg;
  cfg.max_epochs = 0;
  cfg.seed = 4;
  const auto r = train(d, cfg);
  EXPECT_TRUE(r.history.empty());
  EXPECT_EQ(r.best_epoch, 0);
  const auto init = NetworkParams<float>::he_uniform(Architecture{}, derive_seed(4, {1}));
  EXPECT_EQ(encode_params(r.classifier.params()), encode_params(init));
}

TEST(Training, ReducesLossAndIsDeterministic) {
  const auto d = worldgen::build_dataset(worldgen::ConceptId::single_relation, {64, 16, 16}, 2);
  TrainConfig cfg;
  cfg.max_epochs = 2;
  cfg.seed = 3;
  const auto a = train(d, cfg);
  const auto b = train(d, cfg);
  ASSERT_EQ(a.history.size(), 2u);
  EXPECT_EQ(encode_params(a.classifier.params()), encode_params(b.classifier.params()));
  for (const auto& e : a.history) EXPECT_TRUE(std::isfinite(e.train_loss));
  EXPECT_GE(a.best_epoch, 1);
}

TEST(Training, ConfigValidation) {
  TrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.learning_rate = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.dropout.dense = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(ModelIo, SaveLoadDirectory) {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "relexp_model_test";
  fs::remove_all(dir);
  const Classifier clf(NetworkParams<float>::he_uniform(Architecture{}, 11));
  ModelMetadata meta;
  meta.best_epoch = 3;
  save_model(dir, clf, meta);
  EXPECT_TRUE(fs::exists(dir / "model.json"));
  ModelMetadata back;
  const Classifier loaded = load_model(dir, &back);
  EXPECT_EQ(back.best_epoch, 3);
  EXPECT_EQ(encode_params(loaded.params()), encode_params(clf.params()));
  EXPECT_THROW(load_model(dir / "nope"), IoError);
  fs::remove_all(dir);
}
