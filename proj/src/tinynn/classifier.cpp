#include "relexp/tinynn/classifier.hpp"

#include <algorithm>
#include <thread>

namespace relexp::tinynn {

namespace {
constexpr std::size_t kChunk = 64;
}

Classifier::Classifier(NetworkParams<float> params) : params_(std::move(params)) {
  params_.arch.validate();
}

std::vector<double> Classifier::probabilities(const Image& image) const {
  return forward_image(params_, image, false, DropoutRates{}, nullptr).first;
}

double Classifier::predict(const Image& image) const { return probabilities(image)[1]; }

std::vector<double> Classifier::predict_batch(std::span<const Image> images, int threads) const {
  std::vector<double> out(images.size());
  const std::size_t chunks = (images.size() + kChunk - 1) / kChunk;
  auto run_chunk = [&](std::size_t chunk) {
    const std::size_t begin = chunk * kChunk;
    const std::size_t end = std::min(images.size(), begin + kChunk);
    const auto inputs = pack_images<float>(images.subspan(begin, end - begin), params_.arch);
    const auto probs = forward<float>(params_, inputs, false, DropoutRates{}, nullptr, nullptr);
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = static_cast<double>(probs(static_cast<Eigen::Index>(i - begin), 1));
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < chunks; c += workers) run_chunk(c);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

template <typename T>
std::pair<std::vector<double>, ForwardCache<T>> forward_image(const NetworkParams<T>& params,
                                                              const Image& image, bool train,
                                                              const DropoutRates& dropout, Rng* rng) {
  ForwardCache<T> cache;
  const Image images[1] = {image};
  const auto inputs = pack_images<T>(images, params.arch);
  const auto probs = forward<T>(params, inputs, train, dropout, rng, &cache);
  std::vector<double> p(static_cast<std::size_t>(probs.cols()));
  for (Eigen::Index j = 0; j < probs.cols(); ++j) p[static_cast<std::size_t>(j)] = static_cast<double>(probs(0, j));
  return {std::move(p), std::move(cache)};
}

template std::pair<std::vector<double>, ForwardCache<float>> forward_image<float>(
    const NetworkParams<float>&, const Image&, bool, const DropoutRates&, Rng*);
template std::pair<std::vector<double>, ForwardCache<double>> forward_image<double>(
    const NetworkParams<double>&, const Image&, bool, const DropoutRates&, Rng*);

}  // namespace relexp::tinynn
