#include "relexp/tinynn/network.hpp"

#include <cmath>

#include "relexp/common/error.hpp"

namespace relexp::tinynn {

void Architecture::validate() const {
  if (height <= 0 || width <= 0 || channels <= 0 || kernel <= 0 || conv1_filters <= 0 ||
      conv2_filters <= 0 || dense1 <= 0 || dense2 <= 0 || classes < 2 || conv2_height() <= 0 ||
      conv2_width() <= 0) {
    throw ConfigError("invalid network architecture");
  }
}

Architecture reduced_architecture() {
  Architecture a;
  a.height = 8;
  a.width = 8;
  a.conv1_filters = 4;
  a.conv2_filters = 4;
  a.dense1 = 16;
  a.dense2 = 8;
  return a;
}

template <typename T>
NetworkParams<T> NetworkParams<T>::zeros(const Architecture& arch) {
  arch.validate();
  NetworkParams p;
  p.arch = arch;
  const int k2 = arch.kernel * arch.kernel;
  p.conv1_w = Matrix<T>::Zero(k2 * arch.channels, arch.conv1_filters);
  p.conv1_b = RowVector<T>::Zero(arch.conv1_filters);
  p.conv2_w = Matrix<T>::Zero(k2 * arch.conv1_filters, arch.conv2_filters);
  p.conv2_b = RowVector<T>::Zero(arch.conv2_filters);
  p.dense1_w = Matrix<T>::Zero(arch.flat_size(), arch.dense1);
  p.dense1_b = RowVector<T>::Zero(arch.dense1);
  p.dense2_w = Matrix<T>::Zero(arch.dense1, arch.dense2);
  p.dense2_b = RowVector<T>::Zero(arch.dense2);
  p.out_w = Matrix<T>::Zero(arch.dense2, arch.classes);
  p.out_b = RowVector<T>::Zero(arch.classes);
  return p;
}

template <typename T>
NetworkParams<T> NetworkParams<T>::he_uniform(const Architecture& arch, std::uint64_t seed) {
  NetworkParams p = zeros(arch);
  Rng rng(seed);
  auto fill = [&](Matrix<T>& w) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows()));
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      w.data()[i] = static_cast<T>((2.0 * uniform_unit(rng) - 1.0) * limit);
    }
  };
  fill(p.conv1_w);
  fill(p.conv2_w);
  fill(p.dense1_w);
  fill(p.dense2_w);
  fill(p.out_w);
  return p;
}

template <typename T>
std::size_t NetworkParams<T>::parameter_count() const {
  std::size_t n = 0;
  visit_tensors(*this, [&](std::string_view, const T*, std::size_t size) { n += size; });
  return n;
}

template <typename T>
bool NetworkParams<T>::all_finite() const {
  bool ok = true;
  visit_tensors(*this, [&](std::string_view, const T* data, std::size_t size) {
    for (std::size_t i = 0; i < size && ok; ++i) ok = std::isfinite(data[i]);
  });
  return ok;
}

template <typename T>
template <typename U>
NetworkParams<U> NetworkParams<T>::cast() const {
  NetworkParams<U> p;
  p.arch = arch;
  p.conv1_w = conv1_w.template cast<U>();
  p.conv1_b = conv1_b.template cast<U>();
  p.conv2_w = conv2_w.template cast<U>();
  p.conv2_b = conv2_b.template cast<U>();
  p.dense1_w = dense1_w.template cast<U>();
  p.dense1_b = dense1_b.template cast<U>();
  p.dense2_w = dense2_w.template cast<U>();
  p.dense2_b = dense2_b.template cast<U>();
  p.out_w = out_w.template cast<U>();
  p.out_b = out_b.template cast<U>();
  return p;
}

namespace {

// Rows of the result are output positions (image-major, then row-major
// position); columns are (ky, kx, channel).
template <typename T>
void im2col(const T* input, int batch, int height, int width, int channels, int kernel,
            Matrix<T>& patches) {
  const int out_h = height - kernel + 1;
  const int out_w = width - kernel + 1;
  patches.resize(static_cast<Eigen::Index>(batch) * out_h * out_w, kernel * kernel * channels);
  const std::size_t image_stride = static_cast<std::size_t>(height) * width * channels;
  for (int b = 0; b < batch; ++b) {
    const T* img = input + b * image_stride;
    for (int y = 0; y < out_h; ++y) {
      for (int x = 0; x < out_w; ++x) {
        T* dst = patches.row((static_cast<Eigen::Index>(b) * out_h + y) * out_w + x).data();
        for (int ky = 0; ky < kernel; ++ky) {
          for (int kx = 0; kx < kernel; ++kx) {
            const T* src = img + (static_cast<std::size_t>(y + ky) * width + (x + kx)) * channels;
            for (int c = 0; c < channels; ++c) *dst++ = src[c];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im(const Matrix<T>& patches, int batch, int height, int width, int channels, int kernel,
            Matrix<T>& grad_input) {
  const int out_h = height - kernel + 1;
  const int out_w = width - kernel + 1;
  grad_input = Matrix<T>::Zero(static_cast<Eigen::Index>(batch) * height * width, channels);
  for (int b = 0; b < batch; ++b) {
    for (int y = 0; y < out_h; ++y) {
      for (int x = 0; x < out_w; ++x) {
        const T* src = patches.row((static_cast<Eigen::Index>(b) * out_h + y) * out_w + x).data();
        for (int ky = 0; ky < kernel; ++ky) {
          for (int kx = 0; kx < kernel; ++kx) {
            T* dst = grad_input
                         .row((static_cast<Eigen::Index>(b) * height + (y + ky)) * width + (x + kx))
                         .data();
            for (int c = 0; c < channels; ++c) dst[c] += *src++;
          }
        }
      }
    }
  }
}

// In place ReLU followed by optional inverted dropout; relu receives the
// pre-dropout activations.
template <typename T>
void relu_dropout(Matrix<T>& x, Matrix<T>& relu, Matrix<T>& mask, bool train, double rate, Rng* rng,
                  bool keep) {
  x = x.cwiseMax(T(0));
  if (keep) relu = x;
  if (train && rate > 0.0) {
    mask.resize(x.rows(), x.cols());
    const T scale = static_cast<T>(1.0 / (1.0 - rate));
    for (Eigen::Index i = 0; i < mask.size(); ++i) {
      mask.data()[i] = uniform_unit(*rng) < rate ? T(0) : scale;
    }
    x.array() *= mask.array();
  } else {
    mask.resize(0, 0);
  }
}

template <typename T>
void softmax_rows(Matrix<T>& logits) {
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    const T mx = row.maxCoeff();
    row = (row.array() - mx).exp().matrix();
    row /= row.sum();
  }
}

// grad <- grad * mask * [relu > 0]
template <typename T>
void relu_dropout_backward(Matrix<T>& grad, const Matrix<T>& relu, const Matrix<T>& mask) {
  if (mask.size() > 0) grad.array() *= mask.array();
  grad.array() *= (relu.array() > T(0)).template cast<T>();
}

}  // namespace

template <typename T>
Matrix<T> pack_images(std::span<const Image> images, const Architecture& arch) {
  Matrix<T> out(static_cast<Eigen::Index>(images.size()), arch.input_size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& img = images[i];
    if (img.width() != arch.width || img.height() != arch.height) {
      throw ConfigError("image is " + std::to_string(img.width()) + "x" +
                        std::to_string(img.height()) + ", network expects " +
                        std::to_string(arch.width) + "x" + std::to_string(arch.height));
    }
    const auto data = img.data();
    for (std::size_t j = 0; j < data.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<T>(data[j]);
    }
  }
  return out;
}

template <typename T>
Matrix<T> forward(const NetworkParams<T>& params, const Matrix<T>& inputs, bool train,
                  const DropoutRates& dropout, Rng* rng, ForwardCache<T>* cache) {
  const Architecture& a = params.arch;
  if (inputs.cols() != a.input_size()) {
    throw ConfigError("input width " + std::to_string(inputs.cols()) + " does not match network input " +
                      std::to_string(a.input_size()));
  }
  if (train && !rng) throw ConfigError("training forward pass needs an rng");
  const int batch = static_cast<int>(inputs.rows());
  ForwardCache<T> local;
  ForwardCache<T>& c = cache ? *cache : local;
  const bool keep = cache != nullptr;
  c.batch = batch;

  Matrix<T> patches1;
  im2col(inputs.data(), batch, a.height, a.width, a.channels, a.kernel, patches1);
  Matrix<T> act1 = patches1 * params.conv1_w;
  act1.rowwise() += params.conv1_b;
  relu_dropout(act1, c.relu1, c.mask1, train, dropout.conv, rng, keep);

  Matrix<T> patches2;
  im2col(act1.data(), batch, a.conv1_height(), a.conv1_width(), a.conv1_filters, a.kernel, patches2);
  Matrix<T> act2 = patches2 * params.conv2_w;
  act2.rowwise() += params.conv2_b;
  relu_dropout(act2, c.relu2, c.mask2, train, dropout.conv, rng, keep);

  Eigen::Map<const Matrix<T>> flat(act2.data(), batch, a.flat_size());
  Matrix<T> h1 = flat * params.dense1_w;
  h1.rowwise() += params.dense1_b;
  relu_dropout(h1, c.relu3, c.mask3, train, dropout.dense, rng, keep);

  Matrix<T> h2 = h1 * params.dense2_w;
  h2.rowwise() += params.dense2_b;
  relu_dropout(h2, c.relu4, c.mask4, train, dropout.dense, rng, keep);

  Matrix<T> probs = h2 * params.out_w;
  probs.rowwise() += params.out_b;
  softmax_rows(probs);

  if (keep) {
    c.patches1 = std::move(patches1);
    c.patches2 = std::move(patches2);
    c.flat = flat;
    c.probs = probs;
  }
  return probs;
}

template <typename T>
T cross_entropy(const Matrix<T>& probs, std::span<const int> labels) {
  if (static_cast<std::size_t>(probs.rows()) != labels.size()) {
    throw ConfigError("label count does not match batch size");
  }
  T sum = 0;
  const T floor = std::numeric_limits<T>::min();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    sum -= std::log(std::max(probs(static_cast<Eigen::Index>(i), labels[i]), floor));
  }
  return sum / static_cast<T>(labels.size());
}

template <typename T>
NetworkParams<T> backward(const NetworkParams<T>& params, const ForwardCache<T>& c,
                          std::span<const int> labels) {
  const Architecture& a = params.arch;
  const int batch = c.batch;
  if (static_cast<std::size_t>(batch) != labels.size() || c.probs.rows() != batch) {
    throw ConfigError("backward: cache and labels disagree on batch size");
  }
  NetworkParams<T> g;
  g.arch = a;

  Matrix<T> d_logits = c.probs;
  for (int i = 0; i < batch; ++i) d_logits(i, labels[static_cast<std::size_t>(i)]) -= T(1);
  d_logits /= static_cast<T>(batch);

  // post-dropout activations feeding each dense layer
  Matrix<T> h2 = c.relu4;
  if (c.mask4.size() > 0) h2.array() *= c.mask4.array();
  Matrix<T> h1 = c.relu3;
  if (c.mask3.size() > 0) h1.array() *= c.mask3.array();

  g.out_w.noalias() = h2.transpose() * d_logits;
  g.out_b = d_logits.colwise().sum();

  Matrix<T> d_h2 = d_logits * params.out_w.transpose();
  relu_dropout_backward(d_h2, c.relu4, c.mask4);
  g.dense2_w.noalias() = h1.transpose() * d_h2;
  g.dense2_b = d_h2.colwise().sum();

  Matrix<T> d_h1 = d_h2 * params.dense2_w.transpose();
  relu_dropout_backward(d_h1, c.relu3, c.mask3);
  g.dense1_w.noalias() = c.flat.transpose() * d_h1;
  g.dense1_b = d_h1.colwise().sum();

  Matrix<T> d_flat = d_h1 * params.dense1_w.transpose();
  Eigen::Map<Matrix<T>> d_act2(d_flat.data(),
                               static_cast<Eigen::Index>(batch) * a.conv2_height() * a.conv2_width(),
                               a.conv2_filters);
  Matrix<T> d_pre2 = d_act2;
  relu_dropout_backward(d_pre2, c.relu2, c.mask2);
  g.conv2_w.noalias() = c.patches2.transpose() * d_pre2;
  g.conv2_b = d_pre2.colwise().sum();

  Matrix<T> d_patches2 = d_pre2 * params.conv2_w.transpose();
  Matrix<T> d_pre1;
  col2im(d_patches2, batch, a.conv1_height(), a.conv1_width(), a.conv1_filters, a.kernel, d_pre1);
  relu_dropout_backward(d_pre1, c.relu1, c.mask1);
  g.conv1_w.noalias() = c.patches1.transpose() * d_pre1;
  g.conv1_b = d_pre1.colwise().sum();
  return g;
}

#define RELEXP_INSTANTIATE(T)                                                                  \
  template struct NetworkParams<T>;                                                            \
  template Matrix<T> pack_images<T>(std::span<const Image>, const Architecture&);              \
  template Matrix<T> forward<T>(const NetworkParams<T>&, const Matrix<T>&, bool,               \
                                const DropoutRates&, Rng*, ForwardCache<T>*);                  \
  template T cross_entropy<T>(const Matrix<T>&, std::span<const int>);                         \
  template NetworkParams<T> backward<T>(const NetworkParams<T>&, const ForwardCache<T>&,       \
                                        std::span<const int>);

RELEXP_INSTANTIATE(float)
RELEXP_INSTANTIATE(double)

template NetworkParams<double> NetworkParams<float>::cast<double>() const;
template NetworkParams<float> NetworkParams<double>::cast<float>() const;
template NetworkParams<float> NetworkParams<float>::cast<float>() const;
template NetworkParams<double> NetworkParams<double>::cast<double>() const;

}  // namespace relexp::tinynn
