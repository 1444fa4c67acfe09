#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "relexp/common/error.hpp"
#include "relexp/surrogate/surrogate.hpp"

namespace relexp::surrogate {

namespace {

constexpr int kPathLength = 100;
constexpr double kPathRatio = 1e-4;
constexpr double kTolerance = 1e-10;
constexpr int kMaxSweeps = 10000;

// Weighted centering shared by the Lasso and its intercept recovery.
struct Centered {
  std::size_t n = 0;
  std::size_t p = 0;
  double weight_sum = 0.0;
  std::vector<double> x_mean;
  double y_mean = 0.0;
  std::vector<std::vector<double>> columns;  // centered, per feature
  std::vector<double> y;                     // centered
  std::vector<double> w;
  std::vector<double> scale;  // sum w x^2 / W per feature
};

Centered center(const Design& d) {
  Centered c;
  c.n = d.rows.size();
  c.p = c.n ? d.rows.front().size() : 0;
  c.w = d.weights;
  c.weight_sum = std::accumulate(d.weights.begin(), d.weights.end(), 0.0);
  if (!(c.weight_sum > 0.0)) throw ConfigError("design has no positive weight");
  c.x_mean.assign(c.p, 0.0);
  for (std::size_t i = 0; i < c.n; ++i) {
    c.y_mean += d.weights[i] * d.targets[i];
    for (std::size_t j = 0; j < c.p; ++j) c.x_mean[j] += d.weights[i] * d.rows[i][j];
  }
  c.y_mean /= c.weight_sum;
  for (auto& m : c.x_mean) m /= c.weight_sum;
  c.columns.assign(c.p, std::vector<double>(c.n));
  c.scale.assign(c.p, 0.0);
  c.y.resize(c.n);
  for (std::size_t i = 0; i < c.n; ++i) {
    c.y[i] = d.targets[i] - c.y_mean;
    for (std::size_t j = 0; j < c.p; ++j) {
      const double v = d.rows[i][j] - c.x_mean[j];
      c.columns[j][i] = v;
      c.scale[j] += d.weights[i] * v * v;
    }
  }
  for (auto& s : c.scale) {
    s /= c.weight_sum;
    if (s < 1e-15) s = 0.0;
  }
  return c;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

LassoSolution finish(const Centered& c, std::vector<double> beta) {
  LassoSolution s;
  s.intercept = c.y_mean;
  for (std::size_t j = 0; j < c.p; ++j) {
    s.intercept -= c.x_mean[j] * beta[j];
    if (beta[j] != 0.0) ++s.nonzeros;
  }
  s.coefficients = std::move(beta);
  return s;
}

// Coordinate descent warm-started from the previous lambda.
class PathSolver {
 public:
  explicit PathSolver(Centered c) : c_(std::move(c)), beta_(c_.p, 0.0), residual_(c_.y) {}

  LassoSolution solve(double lambda) {
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      double max_change = 0.0;
      for (std::size_t j = 0; j < c_.p; ++j) {
        if (c_.scale[j] == 0.0) continue;
        const auto& col = c_.columns[j];
        double rho = 0.0;
        for (std::size_t i = 0; i < c_.n; ++i) rho += c_.w[i] * col[i] * residual_[i];
        rho = rho / c_.weight_sum + c_.scale[j] * beta_[j];
        const double updated = soft_threshold(rho, lambda) / c_.scale[j];
        const double delta = updated - beta_[j];
        if (delta != 0.0) {
          for (std::size_t i = 0; i < c_.n; ++i) residual_[i] -= col[i] * delta;
          beta_[j] = updated;
          max_change = std::max(max_change, std::abs(delta) * std::sqrt(c_.scale[j]));
        }
      }
      if (max_change < kTolerance) break;
    }
    return finish(c_, beta_);
  }

 private:
  Centered c_;
  std::vector<double> beta_;
  std::vector<double> residual_;
};

}  // namespace

Design design_from_pool(const SamplePool& pool) {
  Design d;
  d.rows.reserve(pool.entries.size());
  for (const auto& e : pool.entries) {
    std::vector<double> row(e.mask.bits.size());
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = e.mask.bits[j] ? 1.0 : 0.0;
    d.rows.push_back(std::move(row));
    d.targets.push_back(e.output);
    d.weights.push_back(e.weight);
  }
  return d;
}

double lambda_max(const Design& design) {
  const Centered c = center(design);
  double best = 0.0;
  for (std::size_t j = 0; j < c.p; ++j) {
    if (c.scale[j] == 0.0) continue;
    double g = 0.0;
    for (std::size_t i = 0; i < c.n; ++i) g += c.w[i] * c.columns[j][i] * c.y[i];
    best = std::max(best, std::abs(g) / c.weight_sum);
  }
  return best;
}

std::vector<LassoSolution> lasso_path(const Design& design, std::span<const double> lambdas) {
  PathSolver solver(center(design));
  std::vector<LassoSolution> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) out.push_back(solver.solve(lambda));
  return out;
}

LassoSolution weighted_least_squares(const Design& design, std::span<const int> support) {
  const std::size_t n = design.rows.size();
  const std::size_t p = n ? design.rows.front().size() : 0;
  const auto k = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), k + 1);
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double sw = std::sqrt(design.weights[i]);
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = sw;
    for (Eigen::Index j = 0; j < k; ++j) {
      a(r, j + 1) = sw * design.rows[i][static_cast<std::size_t>(support[static_cast<std::size_t>(j)])];
    }
    b(r) = sw * design.targets[i];
  }
  const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(b);
  LassoSolution s;
  s.coefficients.assign(p, 0.0);
  s.intercept = sol(0);
  for (Eigen::Index j = 0; j < k; ++j) {
    s.coefficients[static_cast<std::size_t>(support[static_cast<std::size_t>(j)])] = sol(j + 1);
    if (sol(j + 1) != 0.0) ++s.nonzeros;
  }
  return s;
}

double surrogate_loss(const Design& design, std::span<const double> coefficients, double intercept) {
  double loss = 0.0;
  for (std::size_t i = 0; i < design.rows.size(); ++i) {
    double g = intercept;
    for (std::size_t j = 0; j < coefficients.size(); ++j) g += coefficients[j] * design.rows[i][j];
    const double r = design.targets[i] - g;
    loss += design.weights[i] * r * r;
  }
  return loss;
}

SurrogateFit fit_k_lasso(const SamplePool& pool, int max_features) {
  if (max_features < 1) throw ConfigError("K must be positive");
  if (pool.entries.size() < static_cast<std::size_t>(max_features) + 1) {
    throw ConfigError("pool of " + std::to_string(pool.entries.size()) +
                      " samples is too small for K = " + std::to_string(max_features));
  }
  const Design design = design_from_pool(pool);
  const Centered c = center(design);
  SurrogateFit fit;
  fit.coefficients.assign(c.p, 0.0);

  std::vector<int> active;
  for (std::size_t j = 0; j < c.p; ++j) {
    if (c.scale[j] > 0.0) active.push_back(static_cast<int>(j));
  }
  double y_var = 0.0;
  for (std::size_t i = 0; i < c.n; ++i) y_var += c.w[i] * c.y[i] * c.y[i];
  if (active.empty() || y_var / c.weight_sum < 1e-24) {
    fit.degenerate = true;
    fit.intercept = c.y_mean;
    fit.loss = surrogate_loss(design, fit.coefficients, fit.intercept);
    return fit;
  }

  std::vector<int> support;
  if (static_cast<std::size_t>(max_features) >= active.size()) {
    support = active;
  } else {
    const double top = lambda_max(design);
    std::vector<double> lambdas(kPathLength);
    for (int i = 0; i < kPathLength; ++i) {
      lambdas[static_cast<std::size_t>(i)] =
          top * std::pow(kPathRatio, static_cast<double>(i) / (kPathLength - 1));
    }
    PathSolver solver(c);
    LassoSolution chosen;
    double chosen_lambda = 0.0;
    for (double lambda : lambdas) {
      chosen = solver.solve(lambda);
      chosen_lambda = lambda;
      if (chosen.nonzeros >= max_features) break;
    }
    fit.lambda = chosen_lambda;
    std::vector<int> nonzero;
    for (std::size_t j = 0; j < c.p; ++j) {
      if (chosen.coefficients[j] != 0.0) nonzero.push_back(static_cast<int>(j));
    }
    std::stable_sort(nonzero.begin(), nonzero.end(), [&](int a, int b) {
      return std::abs(chosen.coefficients[static_cast<std::size_t>(a)]) >
             std::abs(chosen.coefficients[static_cast<std::size_t>(b)]);
    });
    if (nonzero.size() > static_cast<std::size_t>(max_features)) {
      nonzero.resize(static_cast<std::size_t>(max_features));
    }
    support = nonzero;
    std::sort(support.begin(), support.end());
  }

  const LassoSolution refit = weighted_least_squares(design, support);
  fit.coefficients = refit.coefficients;
  fit.intercept = refit.intercept;
  fit.support = support;
  fit.loss = surrogate_loss(design, fit.coefficients, fit.intercept);
  return fit;
}

}  // namespace relexp::surrogate
