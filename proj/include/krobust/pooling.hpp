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

// Layer-wise pooling of per-layer [CLS] vectors with analytic gradients.
//
// Row i of a LayerStack is the [CLS] hidden state after encoder layer i + 1;
// the embedding lookup output is not a row. Row 0 is the first layer and
// row N - 1 the last.

#ifndef KROBUST_POOLING_HPP_
#define KROBUST_POOLING_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "krobust/error.hpp"

namespace krobust {

class LayerStack {
 public:
  LayerStack() = default;

  LayerStack(std::size_t n_layers, std::size_t dim)
      : n_layers_(n_layers), dim_(dim), values_(n_layers * dim, 0.0) {
    if (n_layers == 0 || dim == 0) throw ShapeError("layer stack needs N >= 1 and M >= 1");
  }

  LayerStack(std::size_t n_layers, std::size_t dim, std::vector<double> values)
      : n_layers_(n_layers), dim_(dim), values_(std::move(values)) {
    if (n_layers == 0 || dim == 0) throw ShapeError("layer stack needs N >= 1 and M >= 1");
    if (values_.size() != n_layers * dim) {
      throw ShapeError("layer stack holds " + std::to_string(values_.size()) +
                       " values, expected " + std::to_string(n_layers * dim));
    }
  }

  std::size_t n_layers() const noexcept { return n_layers_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<double> row(std::size_t layer) {
    return {values_.data() + layer * dim_, dim_};
  }
  std::span<const double> row(std::size_t layer) const {
    return {values_.data() + layer * dim_, dim_};
  }

  double& operator()(std::size_t layer, std::size_t m) { return values_[layer * dim_ + m]; }
  double operator()(std::size_t layer, std::size_t m) const { return values_[layer * dim_ + m]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const LayerStack&, const LayerStack&) = default;

 private:
  std::size_t n_layers_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

// Raw learnable weights w; the pooling uses alpha = softmax(w).
struct LayerWeights {
  std::vector<double> raw;

  static LayerWeights zeros(std::size_t n_layers) {
    return LayerWeights{std::vector<double>(n_layers, 0.0)};
  }

  std::size_t size() const noexcept { return raw.size(); }

  std::vector<double> alpha() const {
    std::vector<double> a(raw.size());
    if (raw.empty()) return a;
    const double peak = *std::max_element(raw.begin(), raw.end());
    double total = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      a[i] = std::exp(raw[i] - peak);
      total += a[i];
    }
    for (double& v : a) v /= total;
    return a;
  }

  friend bool operator==(const LayerWeights&, const LayerWeights&) = default;
};

enum class PoolingStrategy {
  Mean,
  Max,
  Weighted,
  FirstLast,
  Last,  // last layer only, the usual fine-tuning baseline
};

inline std::string_view to_string(PoolingStrategy s) noexcept {
  switch (s) {
    case PoolingStrategy::Mean: return "mean";
    case PoolingStrategy::Max: return "max";
    case PoolingStrategy::Weighted: return "weighted";
    case PoolingStrategy::FirstLast: return "first-last";
    case PoolingStrategy::Last: return "last";
  }
  return "?";
}

inline PoolingStrategy parse_pooling_strategy(std::string_view name) {
  for (auto s : {PoolingStrategy::Mean, PoolingStrategy::Max, PoolingStrategy::Weighted,
                 PoolingStrategy::FirstLast, PoolingStrategy::Last}) {
    if (to_string(s) == name) return s;
  }
  if (name == "first_last" || name == "firstlast") return PoolingStrategy::FirstLast;
  throw InputError("unknown pooling strategy: " + std::string(name));
}

inline std::vector<double> pool_mean(const LayerStack& stack) {
  std::vector<double> out(stack.dim(), 0.0);
  for (std::size_t i = 0; i < stack.n_layers(); ++i) {
    const auto r = stack.row(i);
    for (std::size_t m = 0; m < out.size(); ++m) out[m] += r[m];
  }
  const double n = static_cast<double>(stack.n_layers());
  for (double& v : out) v /= n;
  return out;
}

inline std::vector<double> pool_max(const LayerStack& stack) {
  const auto first = stack.row(0);
  std::vector<double> out(first.begin(), first.end());
  for (std::size_t i = 1; i < stack.n_layers(); ++i) {
    const auto r = stack.row(i);
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = std::max(out[m], r[m]);
  }
  return out;
}

inline void check_weights(const LayerStack& stack, const LayerWeights& weights) {
  if (weights.size() != stack.n_layers()) {
    throw ShapeError("layer weights have length " + std::to_string(weights.size()) +
                     ", stack has " + std::to_string(stack.n_layers()) + " layers");
  }
}

inline std::vector<double> pool_weighted(const LayerStack& stack, const LayerWeights& weights) {
  check_weights(stack, weights);
  const auto alpha = weights.alpha();
  std::vector<double> out(stack.dim(), 0.0);
  for (std::size_t i = 0; i < stack.n_layers(); ++i) {
    const auto r = stack.row(i);
    for (std::size_t m = 0; m < out.size(); ++m) out[m] += alpha[i] * r[m];
  }
  return out;
}

// For N = 1 this is twice the only row.
inline std::vector<double> pool_first_last(const LayerStack& stack) {
  const auto first = stack.row(0);
  const auto last = stack.row(stack.n_layers() - 1);
  std::vector<double> out(stack.dim());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = last[m] + first[m];
  return out;
}

inline std::vector<double> pool_last(const LayerStack& stack) {
  const auto last = stack.row(stack.n_layers() - 1);
  return {last.begin(), last.end()};
}

// `weights` is only consulted by the weighted strategy.
inline std::vector<double> pool(const LayerStack& stack, PoolingStrategy strategy,
                                const LayerWeights& weights) {
  switch (strategy) {
    case PoolingStrategy::Mean: return pool_mean(stack);
    case PoolingStrategy::Max: return pool_max(stack);
    case PoolingStrategy::Weighted: return pool_weighted(stack, weights);
    case PoolingStrategy::FirstLast: return pool_first_last(stack);
    case PoolingStrategy::Last: return pool_last(stack);
  }
  return {};
}

enum class CosineSchedule {
  DownUp,  // cos over [0, 2pi]: high at both ends
  UpDown,  // cos over [pi, 3pi]: high in the middle
};

inline std::string_view to_string(CosineSchedule s) noexcept {
  return s == CosineSchedule::DownUp ? "down-up" : "up-down";
}

// Raw weights cos(start + (i - 1) / (N - 1) * 2pi), i = 1..N, sampled at N
// evenly spaced points including both endpoints. They initialize w and go
// through the same softmax as learned weights.
inline LayerWeights init_weights_cosine(std::size_t n_layers, CosineSchedule schedule) {
  if (n_layers < 2) throw DegenerateScheduleError("cosine schedule needs at least 2 layers");
  const double start = schedule == CosineSchedule::DownUp ? 0.0 : std::numbers::pi;
  LayerWeights w;
  w.raw.resize(n_layers);
  for (std::size_t i = 0; i < n_layers; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_layers - 1);
    w.raw[i] = std::cos(start + t * 2.0 * std::numbers::pi);
  }
  return w;
}

struct PoolGradients {
  LayerStack stack;                        // dL/dvalues, N x M
  std::optional<std::vector<double>> raw;  // dL/dw, weighted strategy only
};

inline PoolGradients pool_backward(const LayerStack& stack, const LayerWeights& weights,
                                   PoolingStrategy strategy,
                                   std::span<const double> upstream) {
  if (upstream.size() != stack.dim()) {
    throw ShapeError("upstream gradient has length " + std::to_string(upstream.size()) +
                     ", pooled dimension is " + std::to_string(stack.dim()));
  }
  const std::size_t n = stack.n_layers();
  const std::size_t dim = stack.dim();
  PoolGradients g{LayerStack(n, dim), std::nullopt};
  switch (strategy) {
    case PoolingStrategy::Mean: {
      const double inv = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t m = 0; m < dim; ++m) g.stack(i, m) = upstream[m] * inv;
      }
      break;
    }
    case PoolingStrategy::Max: {
      // Strict comparison keeps the lowest layer on ties.
      for (std::size_t m = 0; m < dim; ++m) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < n; ++i) {
          if (stack(i, m) > stack(arg, m)) arg = i;
        }
        g.stack(arg, m) = upstream[m];
      }
      break;
    }
    case PoolingStrategy::Weighted: {
      check_weights(stack, weights);
      const auto alpha = weights.alpha();
      const auto pooled = pool_weighted(stack, weights);
      std::vector<double> gw(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double dot = 0.0;
        for (std::size_t m = 0; m < dim; ++m) {
          g.stack(i, m) = alpha[i] * upstream[m];
          dot += upstream[m] * (stack(i, m) - pooled[m]);
        }
        gw[i] = alpha[i] * dot;
      }
      g.raw = std::move(gw);
      break;
    }
    case PoolingStrategy::FirstLast: {
      for (std::size_t m = 0; m < dim; ++m) {
        g.stack(0, m) += upstream[m];
        g.stack(n - 1, m) += upstream[m];
      }
      break;
    }
    case PoolingStrategy::Last: {
      for (std::size_t m = 0; m < dim; ++m) g.stack(n - 1, m) = upstream[m];
      break;
    }
  }
  return g;
}

}  // namespace krobust

#endif  // KROBUST_POOLING_HPP_
