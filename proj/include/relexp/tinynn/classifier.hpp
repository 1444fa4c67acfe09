#pragma once

#include <span>
#include <vector>

#include "relexp/tinynn/network.hpp"

namespace relexp::tinynn {

// The black box: class-1 ("concept") probability of an image. Prediction is
// const and reentrant, so one instance may be shared across threads.
class Classifier {
 public:
  explicit Classifier(NetworkParams<float> params);

  const NetworkParams<float>& params() const { return params_; }
  const Architecture& architecture() const { return params_.arch; }

  // Both class probabilities, dropout disabled.
  std::vector<double> probabilities(const Image& image) const;
  double predict(const Image& image) const;
  // Images are evaluated in chunks; threads > 1 spreads chunks over workers.
  std::vector<double> predict_batch(std::span<const Image> images, int threads = 1) const;

 private:
  NetworkParams<float> params_;
};

// Single-image forward pass in the given precision.
template <typename T>
std::pair<std::vector<double>, ForwardCache<T>> forward_image(const NetworkParams<T>& params,
                                                              const Image& image, bool train,
                                                              const DropoutRates& dropout, Rng* rng);

}  // namespace relexp::tinynn
