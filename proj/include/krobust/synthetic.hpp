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

// Synthetic layer stacks for exercising the pooling strategies without an
// encoder.
//
// The first half of the dimensions ("token" dims) carries the label in the
// first layer, the second half ("semantic" dims) carries it in the last
// layer; layers in between interpolate linearly between the two. Each class
// has a fixed +1/-1 code per dim drawn from code_seed, so train and test
// sets generated with different seeds describe the same classes. Every value
// has unit Gaussian noise added. An attack at rate r erases the label signal
// from each semantic dim of the last layer with probability r; the draws are
// fixed per (example, dim), so the corrupted set at a lower rate is contained
// in the one at a higher rate. Clean content does not depend on the rate.

#ifndef KROBUST_SYNTHETIC_HPP_
#define KROBUST_SYNTHETIC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "krobust/error.hpp"
#include "krobust/pooling.hpp"
#include "krobust/probe.hpp"
#include "krobust/random.hpp"

namespace krobust {

struct SyntheticSpec {
  std::size_t n_examples = 1000;
  std::size_t n_layers = 12;
  std::size_t dim = 16;
  std::size_t n_classes = 2;
  double first_signal = 0.6;  // per-dim class offset in the first layer
  double last_signal = 1.0;   // per-dim class offset in the last layer
  double noise = 1.0;
  std::uint64_t seed = 0;       // draws labels and noise
  std::uint64_t code_seed = 0;  // draws the class codes; share it across splits
  std::string id_prefix = "ex";
};

namespace detail {

// +1/-1 code per (class, dim); class 1 is the negation of class 0 so the
// binary case is symmetric.
inline std::vector<double> class_codes(const SyntheticSpec& spec) {
  Rng rng(spec.code_seed);
  std::vector<double> codes(spec.n_classes * spec.dim);
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    for (std::size_t d = 0; d < spec.dim; ++d) {
      double v;
      if (c == 1) {
        v = -codes[d];
      } else {
        v = rng.below(2) == 0 ? 1.0 : -1.0;
      }
      codes[c * spec.dim + d] = v;
    }
  }
  return codes;
}

}  // namespace detail

inline std::vector<LabeledStack> generate_synthetic(const SyntheticSpec& spec,
                                                    double attack_rate = 0.0) {
  if (spec.n_layers < 2 || spec.dim < 2 || spec.n_classes < 2) {
    throw InputError("synthetic stacks need >= 2 layers, >= 2 dims and >= 2 classes");
  }
  if (!(attack_rate >= 0.0 && attack_rate <= 1.0)) throw InputError("attack rate outside [0, 1]");
  const auto codes = detail::class_codes(spec);
  const std::size_t half = spec.dim / 2;
  const std::size_t n = spec.n_layers;
  std::vector<LabeledStack> out;
  out.reserve(spec.n_examples);
  for (std::size_t j = 0; j < spec.n_examples; ++j) {
    Rng rng(derive_seed(spec.seed, 2 * j));
    Rng attack_rng(derive_seed(spec.seed, 2 * j + 1));
    const auto label = static_cast<int>(rng.below(spec.n_classes));
    const double* code = codes.data() + static_cast<std::size_t>(label) * spec.dim;
    LayerStack stack(n, spec.dim);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n - 1);
      for (std::size_t d = 0; d < spec.dim; ++d) {
        const double strength = d < half ? (1.0 - t) * spec.first_signal : t * spec.last_signal;
        stack(i, d) = strength * code[d] + spec.noise * rng.normal();
      }
    }
    for (std::size_t d = half; d < spec.dim; ++d) {
      if (attack_rng.uniform() < attack_rate) stack(n - 1, d) -= spec.last_signal * code[d];
    }
    out.push_back({spec.id_prefix + std::to_string(j), label, std::move(stack)});
  }
  return out;
}

}  // namespace krobust

#endif  // KROBUST_SYNTHETIC_HPP_
