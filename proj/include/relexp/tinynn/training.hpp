#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "relexp/tinynn/classifier.hpp"
#include "relexp/worldgen/dataset.hpp"

namespace relexp::tinynn {

struct TrainConfig {
  int max_epochs = 10;
  int patience = 5;  // epochs without validation-loss improvement
  int batch_size = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  DropoutRates dropout;
  std::uint64_t seed = 1;

  void validate() const;
};

struct EpochMetrics {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  Classifier classifier;
  std::vector<EpochMetrics> history;
  int best_epoch = 0;  // 0 when no epoch ran
  bool early_stopped = false;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

// Adam on mean cross-entropy. Returns the parameters of the epoch with the
// lowest validation loss; stops after max_epochs or once patience epochs
// pass without improvement. Throws TrainingError on a non-finite loss.
TrainResult train(const worldgen::DatasetSplit& data, const TrainConfig& config,
                  const Architecture& arch = {}, const EpochCallback& on_epoch = {});

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

Evaluation evaluate(const Classifier& classifier, std::span<const worldgen::LabeledImage> items,
                    int threads = 1);

}  // namespace relexp::tinynn
