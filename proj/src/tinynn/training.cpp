#include "relexp/tinynn/training.hpp"

#include <cmath>
#include <numeric>

#include "relexp/common/error.hpp"

namespace relexp::tinynn {

void TrainConfig::validate() const {
  if (max_epochs < 0) throw ConfigError("max_epochs must be non-negative");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw ConfigError("learning rate must be in (0,1]");
  if (!(dropout.conv >= 0.0 && dropout.conv < 1.0) || !(dropout.dense >= 0.0 && dropout.dense < 1.0)) {
    throw ConfigError("dropout rates must be in [0,1)");
  }
}

namespace {

class Adam {
 public:
  Adam(const NetworkParams<float>& shape, const TrainConfig& cfg) : cfg_(cfg) {
    visit_tensors(shape, [&](std::string_view, const float*, std::size_t n) {
      m_.emplace_back(n, 0.0f);
      v_.emplace_back(n, 0.0f);
    });
  }

  void step(NetworkParams<float>& params, const NetworkParams<float>& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double c2 = 1.0 - std::pow(cfg_.beta2, t_);
    const float lr = static_cast<float>(cfg_.learning_rate * std::sqrt(c2) / c1);
    const float b1 = static_cast<float>(cfg_.beta1);
    const float b2 = static_cast<float>(cfg_.beta2);
    const float eps = static_cast<float>(cfg_.epsilon * std::sqrt(c2));
    std::vector<const float*> g;
    visit_tensors(grads, [&](std::string_view, const float* data, std::size_t) { g.push_back(data); });
    std::size_t k = 0;
    visit_tensors(params, [&](std::string_view, float* w, std::size_t n) {
      float* m = m_[k].data();
      float* v = v_[k].data();
      const float* gr = g[k];
      for (std::size_t i = 0; i < n; ++i) {
        m[i] = b1 * m[i] + (1.0f - b1) * gr[i];
        v[i] = b2 * v[i] + (1.0f - b2) * gr[i] * gr[i];
        w[i] -= lr * m[i] / (std::sqrt(v[i]) + eps);
      }
      ++k;
    });
  }

 private:
  TrainConfig cfg_;
  int t_ = 0;
  std::vector<std::vector<float>> m_;
  std::vector<std::vector<float>> v_;
};

}  // namespace

Evaluation evaluate(const Classifier& classifier, std::span<const worldgen::LabeledImage> items,
                    int threads) {
  Evaluation e;
  if (items.empty()) return e;
  std::vector<Image> images;
  images.reserve(items.size());
  for (const auto& it : items) images.push_back(it.image);
  const auto p = classifier.predict_batch(images, threads);
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double pi = items[i].label ? p[i] : 1.0 - p[i];
    loss -= std::log(std::max(pi, 1e-12));
    if ((p[i] >= 0.5) == items[i].label) ++correct;
  }
  e.loss = loss / static_cast<double>(items.size());
  e.accuracy = static_cast<double>(correct) / static_cast<double>(items.size());
  return e;
}

TrainResult train(const worldgen::DatasetSplit& data, const TrainConfig& config,
                  const Architecture& arch, const EpochCallback& on_epoch) {
  config.validate();
  if (data.train.empty() && config.max_epochs > 0) throw ConfigError("empty training split");
  auto params = NetworkParams<float>::he_uniform(arch, derive_seed(config.seed, {1}));
  TrainResult result{Classifier(params), {}, 0, false};
  Rng rng(derive_seed(config.seed, {2}));
  Adam adam(params, config);

  const auto& val = data.val.empty() ? data.train : data.val;
  double best_loss = INFINITY;
  int since_best = 0;
  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch_size = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(uniform_index(rng, static_cast<int>(i)))]);
    }
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::vector<Image> batch_images;
    std::vector<int> labels;
    for (std::size_t start = 0, b = 0; start < order.size(); start += batch_size, ++b) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      batch_images.clear();
      labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch_images.push_back(data.train[order[i]].image);
        labels.push_back(data.train[order[i]].label ? 1 : 0);
      }
      const auto inputs = pack_images<float>(batch_images, arch);
      ForwardCache<float> cache;
      const auto probs = forward<float>(params, inputs, true, config.dropout, &rng, &cache);
      const float loss = cross_entropy<float>(probs, labels);
      if (!std::isfinite(loss)) throw TrainingError(epoch, b, "non-finite loss");
      loss_sum += static_cast<double>(loss) * static_cast<double>(end - start);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if ((probs(static_cast<Eigen::Index>(i), 1) >= 0.5f) == (labels[i] == 1)) ++correct;
      }
      const auto grads = backward<float>(params, cache, labels);
      adam.step(params, grads);
      if (!params.all_finite()) throw TrainingError(epoch, b, "non-finite parameters");
    }
    Classifier current(params);
    const auto v = evaluate(current, val);
    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = loss_sum / static_cast<double>(order.size());
    m.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    m.val_loss = v.loss;
    m.val_accuracy = v.accuracy;
    result.history.push_back(m);
    if (on_epoch) on_epoch(m);
    if (!std::isfinite(v.loss)) throw TrainingError(epoch, 0, "non-finite validation loss");
    if (v.loss < best_loss) {
      best_loss = v.loss;
      since_best = 0;
      result.best_epoch = epoch;
      result.classifier = std::move(current);
    } else if (++since_best >= config.patience) {
      result.early_stopped = epoch < config.max_epochs;
      break;
    }
  }
  return result;
}

}  // namespace relexp::tinynn
