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

// Trains one probe per pooling strategy on the original training stacks and
// evaluates each on every test condition, producing Table-style rows.

#ifndef KROBUST_EXPERIMENT_HPP_
#define KROBUST_EXPERIMENT_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "krobust/error.hpp"
#include "krobust/eval.hpp"
#include "krobust/pooling.hpp"
#include "krobust/probe.hpp"

namespace krobust {

enum class WeightInit { Zero, DownUp, UpDown };

inline WeightInit parse_weight_init(std::string_view s) {
  if (s == "zero") return WeightInit::Zero;
  if (s == "down-up") return WeightInit::DownUp;
  if (s == "up-down") return WeightInit::UpDown;
  throw InputError("unknown weight initialization: " + std::string(s));
}

inline LayerWeights initial_weights(WeightInit init, std::size_t n_layers) {
  switch (init) {
    case WeightInit::Zero: return LayerWeights::zeros(n_layers);
    case WeightInit::DownUp: return init_weights_cosine(n_layers, CosineSchedule::DownUp);
    case WeightInit::UpDown: return init_weights_cosine(n_layers, CosineSchedule::UpDown);
  }
  return LayerWeights::zeros(n_layers);
}

struct Evaluation {
  EvalReport report;
  std::vector<Prediction> predictions;
};

inline void check_stack_shape(const ProbeCheckpoint& ck, const LabeledStack& s) {
  if (s.stack.n_layers() != ck.n_layers || s.stack.dim() != ck.head.dim) {
    throw ShapeError("stack " + s.id + " is " + std::to_string(s.stack.n_layers()) + "x" +
                     std::to_string(s.stack.dim()) + ", probe expects " +
                     std::to_string(ck.n_layers) + "x" + std::to_string(ck.head.dim));
  }
}

inline Evaluation evaluate(const ProbeCheckpoint& ck, std::span<const LabeledStack> stacks,
                           Condition condition = Condition::original()) {
  Evaluation out;
  std::vector<int> labels;
  std::vector<int> preds;
  for (const auto& s : stacks) {
    check_stack_shape(ck, s);
    out.predictions.push_back(predict(ck.head, ck.weights, ck.strategy, s.stack));
    labels.push_back(s.label);
    preds.push_back(out.predictions.back().label);
  }
  out.report = macro_metrics(labels, preds, ck.head.classes);
  out.report.condition = std::move(condition);
  return out;
}

enum class VoteMethod { Hard, Soft };

inline Evaluation evaluate_ensemble(std::span<const ProbeCheckpoint> probes,
                                    std::span<const LabeledStack> stacks, VoteMethod method,
                                    Condition condition = Condition::original()) {
  if (probes.size() < 2) throw InputError("an ensemble needs at least two probes");
  const std::size_t classes = probes.front().head.classes;
  for (const auto& p : probes) {
    if (p.head.classes != classes) throw InputError("ensemble members disagree on class count");
  }
  Evaluation out;
  std::vector<int> labels;
  std::vector<int> preds;
  for (const auto& s : stacks) {
    std::vector<int> votes;
    std::vector<std::vector<double>> probs;
    for (const auto& p : probes) {
      check_stack_shape(p, s);
      auto pr = predict(p.head, p.weights, p.strategy, s.stack);
      votes.push_back(pr.label);
      probs.push_back(std::move(pr.probabilities));
    }
    const auto soft = soft_vote(probs);
    const int label = method == VoteMethod::Hard ? hard_vote(votes, probs) : soft.label;
    out.predictions.push_back({label, soft.mean});
    labels.push_back(s.label);
    preds.push_back(label);
  }
  out.report = macro_metrics(labels, preds, classes);
  out.report.condition = std::move(condition);
  return out;
}

struct ConditionStacks {
  Condition condition;
  std::vector<LabeledStack> stacks;
};

struct ExperimentResult {
  std::vector<ReportRow> rows;
  std::vector<ProbeCheckpoint> probes;
  std::vector<std::vector<double>> loss_curves;
  std::vector<double> val_losses;  // final-epoch validation loss per strategy
};

// Every condition must list the same ids in the same order.
inline void check_aligned(std::span<const ConditionStacks> conditions) {
  if (conditions.empty()) throw InputError("no test conditions");
  const auto& ref = conditions.front().stacks;
  for (const auto& c : conditions) {
    if (c.stacks.size() != ref.size()) {
      throw IntegrityError("condition \"" + c.condition.label + "\" has " +
                           std::to_string(c.stacks.size()) + " examples, expected " +
                           std::to_string(ref.size()));
    }
    for (std::size_t i = 0; i < ref.size(); ++i) {
      if (c.stacks[i].id != ref[i].id) {
        throw IntegrityError("condition \"" + c.condition.label + "\" has id \"" +
                             c.stacks[i].id + "\" where \"" + ref[i].id + "\" is expected");
      }
    }
  }
}

inline ExperimentResult run_experiment(std::span<const LabeledStack> train_set,
                                       std::span<const LabeledStack> val_set,
                                       std::span<const ConditionStacks> conditions,
                                       std::span<const PoolingStrategy> strategies,
                                       const TrainConfig& base, WeightInit init = WeightInit::Zero,
                                       DeltaMode mode = DeltaMode::Unrounded,
                                       std::string_view model_prefix = {}) {
  check_aligned(conditions);
  if (train_set.empty()) throw InputError("no training stacks");
  const std::size_t n_layers = train_set.front().stack.n_layers();
  std::size_t classes = infer_class_count(train_set);
  for (const auto& c : conditions) {
    classes = std::max(classes, infer_class_count(c.stacks));
  }
  ExperimentResult result;
  for (PoolingStrategy s : strategies) {
    TrainConfig cfg = base;
    cfg.strategy = s;
    const auto init_w = s == PoolingStrategy::Weighted ? initial_weights(init, n_layers)
                                                       : LayerWeights::zeros(n_layers);
    auto trained = train(train_set, cfg, init_w, classes);
    ProbeCheckpoint ck{n_layers, s, std::move(trained.weights), std::move(trained.head)};
    std::vector<EvalReport> cells;
    for (const auto& c : conditions) cells.push_back(evaluate(ck, c.stacks, c.condition).report);
    std::string name = model_prefix.empty() ? std::string(to_string(s))
                                            : std::string(model_prefix) + " + " + std::string(to_string(s));
    result.rows.push_back(make_report_row(std::move(name), std::move(cells), mode));
    result.val_losses.push_back(mean_loss(ck.head, ck.weights, s, val_set));
    result.loss_curves.push_back(std::move(trained.loss_curve));
    result.probes.push_back(std::move(ck));
  }
  return result;
}

}  // namespace krobust

#endif  // KROBUST_EXPERIMENT_HPP_
