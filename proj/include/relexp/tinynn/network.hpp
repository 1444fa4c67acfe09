#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string_view>

#include "relexp/common/image.hpp"
#include "relexp/common/rng.hpp"

namespace relexp::tinynn {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;

// conv(valid, stride 1) -> ReLU -> conv -> ReLU -> flatten -> dense -> ReLU
// -> dense -> ReLU -> dense -> softmax. No pooling anywhere.
struct Architecture {
  int height = 32;
  int width = 32;
  int channels = 3;
  int kernel = 2;
  int conv1_filters = 16;
  int conv2_filters = 16;
  int dense1 = 256;
  int dense2 = 128;
  int classes = 2;

  int conv1_height() const { return height - kernel + 1; }
  int conv1_width() const { return width - kernel + 1; }
  int conv2_height() const { return conv1_height() - kernel + 1; }
  int conv2_width() const { return conv1_width() - kernel + 1; }
  int input_size() const { return height * width * channels; }
  int flat_size() const { return conv2_height() * conv2_width() * conv2_filters; }

  // Throws ConfigError when a dimension is non-positive.
  void validate() const;
  bool operator==(const Architecture&) const = default;
};

// 8x8 input, 4 filters per conv, dense 16/8; used for gradient checks.
Architecture reduced_architecture();

struct DropoutRates {
  double conv = 0.1;
  double dense = 0.2;
};

template <typename T>
struct NetworkParams {
  Architecture arch;
  Matrix<T> conv1_w;  // (kernel*kernel*channels) x conv1_filters
  RowVector<T> conv1_b;
  Matrix<T> conv2_w;  // (kernel*kernel*conv1_filters) x conv2_filters
  RowVector<T> conv2_b;
  Matrix<T> dense1_w;  // flat_size x dense1
  RowVector<T> dense1_b;
  Matrix<T> dense2_w;  // dense1 x dense2
  RowVector<T> dense2_b;
  Matrix<T> out_w;  // dense2 x classes
  RowVector<T> out_b;

  static NetworkParams zeros(const Architecture& arch);
  // He-uniform fan-in initialization, biases zero.
  static NetworkParams he_uniform(const Architecture& arch, std::uint64_t seed);

  std::size_t parameter_count() const;
  bool all_finite() const;

  template <typename U>
  NetworkParams<U> cast() const;
};

// Visits the tensors of a (const or mutable) NetworkParams in the fixed
// storage order as f(name, data, size).
template <typename Params, typename F>
void visit_tensors(Params& p, F&& f) {
  auto call = [&](std::string_view name, auto& tensor) {
    f(name, tensor.data(), static_cast<std::size_t>(tensor.size()));
  };
  call("conv1_w", p.conv1_w);
  call("conv1_b", p.conv1_b);
  call("conv2_w", p.conv2_w);
  call("conv2_b", p.conv2_b);
  call("dense1_w", p.dense1_w);
  call("dense1_b", p.dense1_b);
  call("dense2_w", p.dense2_w);
  call("dense2_b", p.dense2_b);
  call("out_w", p.out_w);
  call("out_b", p.out_b);
}

// Intermediates kept by forward for backprop. Masks are empty when dropout
// was inactive.
template <typename T>
struct ForwardCache {
  int batch = 0;
  Matrix<T> patches1;
  Matrix<T> relu1;
  Matrix<T> mask1;
  Matrix<T> patches2;
  Matrix<T> relu2;
  Matrix<T> mask2;
  Matrix<T> flat;  // dropped-out conv2 activations, batch x flat_size
  Matrix<T> relu3;
  Matrix<T> mask3;
  Matrix<T> relu4;
  Matrix<T> mask4;
  Matrix<T> probs;
};

// Packs images row-wise into batch x input_size (HWC order).
template <typename T>
Matrix<T> pack_images(std::span<const Image> images, const Architecture& arch);

// Class probabilities, batch x classes. Dropout is applied only when train is
// set (inverted dropout, masks drawn from rng). cache may be null.
template <typename T>
Matrix<T> forward(const NetworkParams<T>& params, const Matrix<T>& inputs, bool train,
                  const DropoutRates& dropout, Rng* rng, ForwardCache<T>* cache);

// Mean cross-entropy of probs against integer labels.
template <typename T>
T cross_entropy(const Matrix<T>& probs, std::span<const int> labels);

// Gradient of the mean cross-entropy with respect to every parameter.
template <typename T>
NetworkParams<T> backward(const NetworkParams<T>& params, const ForwardCache<T>& cache,
                          std::span<const int> labels);

}  // namespace relexp::tinynn
