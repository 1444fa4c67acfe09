#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "relexp/common/image.hpp"
#include "relexp/percept/percept.hpp"

namespace relexp::surrogate {

// Black-box access: concept probability for each image of a batch.
using BatchPredictor = std::function<std::vector<double>(std::span<const Image>)>;

// One bit per super-pixel; true keeps the original content.
struct Mask {
  std::vector<bool> bits;

  static Mask all_on(std::size_t n) { return {std::vector<bool>(n, true)}; }
  std::size_t size() const { return bits.size(); }
  std::size_t count_on() const;
  bool operator==(const Mask&) const = default;
};

// Fills every switched-off cell with the background color.
Image switch_off(const Image& image, std::span<const percept::SuperPixel> cells, const Mask& mask);

inline constexpr double kDefaultKernelWidth = 0.25;

// exp(-MSE(original, perturbed) / width^2)
double locality_weight(const Image& original, const Image& perturbed,
                       double kernel_width = kDefaultKernelWidth);

struct PoolEntry {
  Mask mask;
  std::uint64_t image_digest = 0;
  double output = 0.0;
  double weight = 1.0;
};

struct SamplePool {
  std::vector<PoolEntry> entries;  // entries[0] is the all-on mask
  std::size_t features = 0;
};

struct PoolOptions {
  double kernel_width = kDefaultKernelWidth;
  double on_probability = 0.5;
  std::size_t batch = 256;  // images handed to the predictor per call
};

// n random masks with independent bits plus the all-on mask.
SamplePool sample_pool(const BatchPredictor& predict, const Image& image,
                       std::span<const percept::SuperPixel> cells, int n_samples, std::uint64_t seed,
                       const PoolOptions& options = {});

struct SurrogateFit {
  std::vector<double> coefficients;  // one per feature, exact zeros off the support
  double intercept = 0.0;
  std::vector<int> support;  // ascending feature indices
  double loss = 0.0;         // sum_z weight * (f(z) - g(z'))^2
  double lambda = 0.0;       // regularization at which the support was taken
  bool degenerate = false;   // constant outputs or features, empty support
};

// Stage 1 walks a decreasing Lasso path (weighted coordinate descent) and
// stops at the largest lambda with at least max_features nonzeros, keeping
// the max_features largest magnitudes. Stage 2 refits weighted least squares
// on that support.
SurrogateFit fit_k_lasso(const SamplePool& pool, int max_features);

enum class SelectionMode { signed_weight, absolute_weight };

// k feature ids with the largest coefficients (or magnitudes), descending,
// ties to the smaller id. Throws ConfigError if k exceeds the coefficients.
std::vector<int> select_top_k(const SurrogateFit& fit, int k,
                              SelectionMode mode = SelectionMode::signed_weight);

// Lower level pieces, exposed for verification.
struct Design {
  std::vector<std::vector<double>> rows;  // 0/1 features per sample
  std::vector<double> targets;
  std::vector<double> weights;
};
Design design_from_pool(const SamplePool& pool);

struct LassoSolution {
  std::vector<double> coefficients;
  double intercept = 0.0;
  int nonzeros = 0;
};

// Weighted Lasso with unpenalized intercept at each lambda (warm-started in
// the given order): minimizes sum w (y - b - x.beta)^2 / (2 sum w) + lambda |beta|_1.
std::vector<LassoSolution> lasso_path(const Design& design, std::span<const double> lambdas);
double lambda_max(const Design& design);

// Weighted least squares with intercept restricted to support (QR based).
LassoSolution weighted_least_squares(const Design& design, std::span<const int> support);
double surrogate_loss(const Design& design, std::span<const double> coefficients, double intercept);

std::string pool_to_csv(const SamplePool& pool);
std::string fit_to_json(const SurrogateFit& fit);

}  // namespace relexp::surrogate
