#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "relexp/common/rng.hpp"
#include "relexp/tinynn/network.hpp"

namespace relexp::fixtures {

struct GradCheck {
  double max_relative_error = 0.0;
  std::size_t parameters = 0;
  std::size_t nonzero = 0;
};

// Central differences on every parameter of the reduced network in double
// precision against backward().
inline GradCheck gradient_check(std::uint64_t seed, int batch = 3, double h = 1e-5) {
  using namespace tinynn;
  const Architecture arch = reduced_architecture();
  auto params = NetworkParams<double>::he_uniform(arch, seed);
  Rng rng(seed + 1);
  // zero biases put some pre-activations exactly on the ReLU kink
  for (auto* b : {&params.conv1_b, &params.conv2_b, &params.dense1_b, &params.dense2_b, &params.out_b}) {
    for (int i = 0; i < b->size(); ++i) (*b)(i) = 0.1 * (uniform_unit(rng) - 0.5);
  }
  Matrix<double> x(batch, arch.input_size());
  for (int i = 0; i < x.size(); ++i) x.data()[i] = uniform_unit(rng);
  std::vector<int> labels;
  for (int b = 0; b < batch; ++b) labels.push_back(b % arch.classes);

  auto loss = [&](const NetworkParams<double>& p) {
    return cross_entropy<double>(forward<double>(p, x, false, {}, nullptr, nullptr), labels);
  };
  ForwardCache<double> cache;
  forward<double>(params, x, false, {}, nullptr, &cache);
  const NetworkParams<double> grad = backward<double>(params, cache, labels);

  std::vector<double> analytic;
  visit_tensors(grad, [&](auto, const double* d, std::size_t n) { analytic.insert(analytic.end(), d, d + n); });

  GradCheck out;
  std::size_t k = 0;
  visit_tensors(params, [&](auto, double* d, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i, ++k) {
      const double saved = d[i];
      d[i] = saved + h;
      const double up = loss(params);
      d[i] = saved - h;
      const double down = loss(params);
      d[i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double a = analytic[k];
      const double scale = std::max({std::abs(a), std::abs(numeric), 1e-7});
      out.max_relative_error = std::max(out.max_relative_error, std::abs(a - numeric) / scale);
      out.nonzero += std::abs(a) > 1e-12;
    }
  });
  out.parameters = k;
  return out;
}

}  // namespace relexp::fixtures
