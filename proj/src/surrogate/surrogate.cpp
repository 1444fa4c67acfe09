#include "relexp/surrogate/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "relexp/common/error.hpp"
#include "relexp/common/rng.hpp"

namespace relexp::surrogate {

std::size_t Mask::count_on() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

Image switch_off(const Image& image, std::span<const percept::SuperPixel> cells, const Mask& mask) {
  if (mask.size() != cells.size()) {
    throw ConfigError("mask has " + std::to_string(mask.size()) + " bits for " +
                      std::to_string(cells.size()) + " super-pixels");
  }
  Image out = image;
  const Rgb background = color_rgb(kBackground);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (mask.bits[i]) continue;
    const auto& b = cells[i].bounds;
    out.fill_rect(b.x0, b.y0, b.x1 - b.x0, b.y1 - b.y0, background);
  }
  return out;
}

double locality_weight(const Image& original, const Image& perturbed, double kernel_width) {
  if (!(kernel_width > 0.0)) throw ConfigError("kernel width must be positive");
  return std::exp(-mean_squared_error(original, perturbed) / (kernel_width * kernel_width));
}

SamplePool sample_pool(const BatchPredictor& predict, const Image& image,
                       std::span<const percept::SuperPixel> cells, int n_samples, std::uint64_t seed,
                       const PoolOptions& options) {
  if (n_samples < 1) throw ConfigError("sample_pool needs at least one sample");
  Rng rng(seed);
  SamplePool pool;
  pool.features = cells.size();
  pool.entries.reserve(static_cast<std::size_t>(n_samples) + 1);
  pool.entries.push_back({Mask::all_on(cells.size()), 0, 0.0, 1.0});
  for (int s = 0; s < n_samples; ++s) {
    Mask m;
    m.bits.resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) m.bits[i] = uniform_unit(rng) < options.on_probability;
    pool.entries.push_back({std::move(m), 0, 0.0, 1.0});
  }
  const std::size_t batch = std::max<std::size_t>(options.batch, 1);
  std::vector<Image> images;
  for (std::size_t start = 0; start < pool.entries.size(); start += batch) {
    const std::size_t end = std::min(pool.entries.size(), start + batch);
    images.clear();
    for (std::size_t i = start; i < end; ++i) {
      images.push_back(switch_off(image, cells, pool.entries[i].mask));
      auto& e = pool.entries[i];
      e.image_digest = digest(images.back());
      e.weight = locality_weight(image, images.back(), options.kernel_width);
    }
    const auto outputs = predict(images);
    if (outputs.size() != images.size()) throw ConfigError("predictor returned a wrong batch size");
    for (std::size_t i = start; i < end; ++i) pool.entries[i].output = outputs[i - start];
  }
  return pool;
}

std::vector<int> select_top_k(const SurrogateFit& fit, int k, SelectionMode mode) {
  if (k < 1 || static_cast<std::size_t>(k) > fit.coefficients.size()) {
    throw ConfigError("cannot select " + std::to_string(k) + " of " +
                      std::to_string(fit.coefficients.size()) + " coefficients");
  }
  std::vector<int> ids(fit.coefficients.size());
  std::iota(ids.begin(), ids.end(), 0);
  auto key = [&](int i) {
    const double w = fit.coefficients[static_cast<std::size_t>(i)];
    return mode == SelectionMode::signed_weight ? w : std::abs(w);
  };
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return key(a) > key(b); });
  ids.resize(static_cast<std::size_t>(k));
  return ids;
}

std::string pool_to_csv(const SamplePool& pool) {
  std::ostringstream out;
  out.precision(17);
  out << "entry,mask,output,weight,digest\n";
  for (std::size_t i = 0; i < pool.entries.size(); ++i) {
    const auto& e = pool.entries[i];
    out << i << ",";
    for (bool b : e.mask.bits) out << (b ? '1' : '0');
    out << "," << e.output << "," << e.weight << "," << std::hex << e.image_digest << std::dec << "\n";
  }
  return out.str();
}

std::string fit_to_json(const SurrogateFit& fit) {
  nlohmann::ordered_json j;
  j["coefficients"] = fit.coefficients;
  j["intercept"] = fit.intercept;
  j["support"] = fit.support;
  j["loss"] = fit.loss;
  j["lambda"] = fit.lambda;
  j["degenerate"] = fit.degenerate;
  return j.dump(2) + "\n";
}

}  // namespace relexp::surrogate
