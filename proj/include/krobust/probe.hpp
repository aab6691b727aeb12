/* Copyright 2026 The krobust Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Linear softmax probe over pooled layer representations, trained by plain
// mini-batch gradient descent through the pooling layer.

#ifndef KROBUST_PROBE_HPP_
#define KROBUST_PROBE_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "krobust/error.hpp"
#include "krobust/math.hpp"
#include "krobust/pooling.hpp"
#include "krobust/random.hpp"

namespace krobust {

// softmax(weight * pooled + bias). weight is classes x dim, row-major.
struct LinearHead {
  std::size_t classes = 0;
  std::size_t dim = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  static LinearHead zeros(std::size_t classes, std::size_t dim) {
    if (classes < 2) throw InputError("a classification head needs at least 2 classes");
    return LinearHead{classes, dim, std::vector<double>(classes * dim, 0.0),
                      std::vector<double>(classes, 0.0)};
  }

  double& w(std::size_t c, std::size_t m) { return weight[c * dim + m]; }
  double w(std::size_t c, std::size_t m) const { return weight[c * dim + m]; }

  friend bool operator==(const LinearHead&, const LinearHead&) = default;
};

struct LabeledStack {
  std::string id;
  int label = 0;
  LayerStack stack;
};

struct TrainConfig {
  double learning_rate = 1e-5;
  int epochs = 5;
  int batch_size = 32;
  std::uint64_t seed = 0;
  PoolingStrategy strategy = PoolingStrategy::Mean;
  bool train_pool_weights = true;

  void validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
      throw InputError("learning rate must be finite and non-negative");
    }
    if (epochs < 1) throw InputError("epochs must be positive");
    if (batch_size < 1) throw InputError("batch size must be positive");
  }
};

inline std::vector<double> head_logits(const LinearHead& head, std::span<const double> pooled) {
  if (pooled.size() != head.dim) {
    throw ShapeError("pooled vector has length " + std::to_string(pooled.size()) +
                     ", head expects " + std::to_string(head.dim));
  }
  std::vector<double> z(head.bias);
  for (std::size_t c = 0; c < head.classes; ++c) {
    for (std::size_t m = 0; m < head.dim; ++m) z[c] += head.w(c, m) * pooled[m];
  }
  return z;
}

inline std::vector<double> forward(const LinearHead& head, std::span<const double> pooled) {
  return softmax(head_logits(head, pooled));
}

struct Prediction {
  int label = 0;
  std::vector<double> probabilities;
};

inline Prediction predict(const LinearHead& head, const LayerWeights& weights,
                          PoolingStrategy strategy, const LayerStack& stack) {
  auto probs = forward(head, pool(stack, strategy, weights));
  const auto label = static_cast<int>(argmax(probs));
  return {label, std::move(probs)};
}

// Cross-entropy of one example and its gradients through head and pooling.
struct ProbeGradients {
  double loss = 0.0;
  std::vector<double> weight;           // classes x dim
  std::vector<double> bias;             // classes
  std::optional<std::vector<double>> raw;  // weighted strategy only
  LayerStack stack;                     // d loss / d stack values
};

inline ProbeGradients probe_gradients(const LinearHead& head, const LayerWeights& weights,
                                      PoolingStrategy strategy, const LayerStack& stack,
                                      int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= head.classes) {
    throw InputError("label " + std::to_string(label) + " outside [0, " +
                     std::to_string(head.classes) + ")");
  }
  const auto pooled = pool(stack, strategy, weights);
  const auto logits = head_logits(head, pooled);
  const double lse = log_sum_exp(logits);
  ProbeGradients g;
  g.loss = lse - logits[static_cast<std::size_t>(label)];
  g.bias.resize(head.classes);
  for (std::size_t c = 0; c < head.classes; ++c) {
    g.bias[c] = std::exp(logits[c] - lse) - (static_cast<int>(c) == label ? 1.0 : 0.0);
  }
  g.weight.assign(head.classes * head.dim, 0.0);
  std::vector<double> upstream(head.dim, 0.0);
  for (std::size_t c = 0; c < head.classes; ++c) {
    for (std::size_t m = 0; m < head.dim; ++m) {
      g.weight[c * head.dim + m] = g.bias[c] * pooled[m];
      upstream[m] += head.w(c, m) * g.bias[c];
    }
  }
  auto pg = pool_backward(stack, weights, strategy, upstream);
  g.stack = std::move(pg.stack);
  g.raw = std::move(pg.raw);
  return g;
}

// Mean cross-entropy over a set of examples.
inline double mean_loss(const LinearHead& head, const LayerWeights& weights,
                        PoolingStrategy strategy, std::span<const LabeledStack> examples) {
  double total = 0.0;
  for (const auto& ex : examples) {
    const auto logits = head_logits(head, pool(ex.stack, strategy, weights));
    total += log_sum_exp(logits) - logits[static_cast<std::size_t>(ex.label)];
  }
  return examples.empty() ? 0.0 : total / static_cast<double>(examples.size());
}

struct TrainResult {
  LinearHead head;
  LayerWeights weights;
  std::vector<double> loss_curve;  // mean batch loss per epoch
};

// Class count implied by the labels: max label + 1, at least 2.
inline std::size_t infer_class_count(std::span<const LabeledStack> examples) {
  int top = 1;
  for (const auto& ex : examples) {
    if (ex.label < 0) throw InputError("negative label in example " + ex.id);
    top = std::max(top, ex.label);
  }
  return static_cast<std::size_t>(top) + 1;
}

// Mini-batch gradient descent on mean cross-entropy from a zero head. Batch
// order comes from `config.seed`; summation order is fixed, so identical
// inputs give bit-identical parameters. The loss curve records, per epoch,
// the mean loss of the examples as they were seen. Pool weights move only
// for the weighted strategy with train_pool_weights set.
inline TrainResult train(std::span<const LabeledStack> examples, const TrainConfig& config,
                         const LayerWeights& init_weights, std::size_t n_classes = 0) {
  config.validate();
  if (examples.empty()) throw InputError("no training examples");
  const std::size_t n_layers = examples.front().stack.n_layers();
  const std::size_t dim = examples.front().stack.dim();
  for (const auto& ex : examples) {
    if (ex.stack.n_layers() != n_layers || ex.stack.dim() != dim) {
      throw ShapeError("example " + ex.id + " is " + std::to_string(ex.stack.n_layers()) + "x" +
                       std::to_string(ex.stack.dim()) + ", expected " +
                       std::to_string(n_layers) + "x" + std::to_string(dim));
    }
  }
  if (config.strategy == PoolingStrategy::Weighted && init_weights.size() != n_layers) {
    throw ShapeError("initial layer weights have length " +
                     std::to_string(init_weights.size()) + ", stacks have " +
                     std::to_string(n_layers) + " layers");
  }
  if (n_classes == 0) n_classes = infer_class_count(examples);
  for (const auto& ex : examples) {
    if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= n_classes) {
      throw InputError("label " + std::to_string(ex.label) + " of example " + ex.id +
                       " outside [0, " + std::to_string(n_classes) + ")");
    }
  }

  TrainResult result{LinearHead::zeros(n_classes, dim), init_weights, {}};
  const bool update_pool =
      config.strategy == PoolingStrategy::Weighted && config.train_pool_weights;
  const auto batch = static_cast<std::size_t>(config.batch_size);
  Rng rng(config.seed);

  std::vector<double> gw(n_classes * dim);
  std::vector<double> gb(n_classes);
  std::vector<double> graw(n_layers);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      std::swap(order[i], order[i + rng.below(order.size() - i)]);
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      std::fill(gw.begin(), gw.end(), 0.0);
      std::fill(gb.begin(), gb.end(), 0.0);
      std::fill(graw.begin(), graw.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const auto& ex = examples[order[k]];
        const auto g =
            probe_gradients(result.head, result.weights, config.strategy, ex.stack, ex.label);
        if (!std::isfinite(g.loss)) {
          throw DivergenceError("non-finite loss in epoch " + std::to_string(epoch + 1));
        }
        epoch_loss += g.loss;
        for (std::size_t i = 0; i < gw.size(); ++i) gw[i] += g.weight[i];
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g.bias[i];
        if (update_pool) {
          for (std::size_t i = 0; i < graw.size(); ++i) graw[i] += (*g.raw)[i];
        }
      }
      const double step = config.learning_rate / static_cast<double>(end - start);
      for (std::size_t i = 0; i < gw.size(); ++i) result.head.weight[i] -= step * gw[i];
      for (std::size_t i = 0; i < gb.size(); ++i) result.head.bias[i] -= step * gb[i];
      if (update_pool) {
        for (std::size_t i = 0; i < graw.size(); ++i) result.weights.raw[i] -= step * graw[i];
      }
    }
    epoch_loss /= static_cast<double>(examples.size());
    if (!std::isfinite(epoch_loss)) {
      throw DivergenceError("non-finite loss in epoch " + std::to_string(epoch + 1));
    }
    result.loss_curve.push_back(epoch_loss);
  }
  return result;
}

// Serialized probe: {dim, n_layers, classes, strategy, pool_weights,
// head_weight, head_bias}.
struct ProbeCheckpoint {
  std::size_t n_layers = 0;
  PoolingStrategy strategy = PoolingStrategy::Mean;
  LayerWeights weights;
  LinearHead head;
};

inline nlohmann::ordered_json to_json(const ProbeCheckpoint& ck) {
  nlohmann::ordered_json j;
  j["dim"] = ck.head.dim;
  j["n_layers"] = ck.n_layers;
  j["classes"] = ck.head.classes;
  j["strategy"] = std::string(to_string(ck.strategy));
  j["pool_weights"] = ck.weights.raw;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < ck.head.classes; ++c) {
    rows.push_back(std::vector<double>(ck.head.weight.begin() + static_cast<std::ptrdiff_t>(c * ck.head.dim),
                                       ck.head.weight.begin() + static_cast<std::ptrdiff_t>((c + 1) * ck.head.dim)));
  }
  j["head_weight"] = std::move(rows);
  j["head_bias"] = ck.head.bias;
  return j;
}

inline ProbeCheckpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    ProbeCheckpoint ck;
    ck.head.dim = j.at("dim").get<std::size_t>();
    ck.n_layers = j.at("n_layers").get<std::size_t>();
    ck.head.classes = j.at("classes").get<std::size_t>();
    ck.strategy = parse_pooling_strategy(j.at("strategy").get<std::string>());
    ck.weights.raw = j.at("pool_weights").get<std::vector<double>>();
    const auto rows = j.at("head_weight").get<std::vector<std::vector<double>>>();
    ck.head.bias = j.at("head_bias").get<std::vector<double>>();
    if (ck.head.classes < 2 || rows.size() != ck.head.classes ||
        ck.head.bias.size() != ck.head.classes) {
      throw ShapeError("checkpoint head does not match its class count");
    }
    for (const auto& r : rows) {
      if (r.size() != ck.head.dim) throw ShapeError("checkpoint head row has wrong length");
      ck.head.weight.insert(ck.head.weight.end(), r.begin(), r.end());
    }
    if (ck.strategy == PoolingStrategy::Weighted && ck.weights.size() != ck.n_layers) {
      throw ShapeError("checkpoint pool weights do not match n_layers");
    }
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed checkpoint: ") + e.what(), 0);
  }
}

}  // namespace krobust

#endif  // KROBUST_PROBE_HPP_
