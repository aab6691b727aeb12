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

// Macro-averaged classification metrics, relative F1 degradation under
// attack, ensemble voting and Table-style report formatting.
//
// Metric values are percentages kept at full precision; rounding to two
// decimals happens only when presenting.

#ifndef KROBUST_EVAL_HPP_
#define KROBUST_EVAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "krobust/attack.hpp"
#include "krobust/error.hpp"
#include "krobust/math.hpp"

namespace krobust {

inline double round2(double x) { return std::round(x * 100.0) / 100.0; }

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

// "Original" has no rate; attacked conditions carry theirs.
struct Condition {
  std::string label = "Original";
  std::optional<double> attack_rate;

  static Condition original() { return {}; }
  static Condition attacked(double rate) {
    return {std::to_string(static_cast<int>(std::lround(rate * 100.0))) + "% Attacked", rate};
  }
};

struct EvalReport {
  Condition condition;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::optional<double> delta_atk;
  std::vector<ClassMetrics> per_class;
};

// Per-class P/R/F1 with undefined ratios taken as 0; macro values are the
// unweighted class means, classes missing from the predictions included.
inline EvalReport macro_metrics(std::span<const int> labels, std::span<const int> predictions,
                                std::size_t n_classes) {
  if (labels.size() != predictions.size()) {
    throw InputError("labels and predictions differ in length");
  }
  if (n_classes == 0) throw InputError("class count must be positive");
  std::vector<std::size_t> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
  std::vector<std::size_t> support(n_classes, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    const int p = predictions[i];
    if (y < 0 || static_cast<std::size_t>(y) >= n_classes || p < 0 ||
        static_cast<std::size_t>(p) >= n_classes) {
      throw InputError("class out of range at example " + std::to_string(i));
    }
    ++support[static_cast<std::size_t>(y)];
    if (y == p) {
      ++tp[static_cast<std::size_t>(y)];
    } else {
      ++fp[static_cast<std::size_t>(p)];
      ++fn[static_cast<std::size_t>(y)];
    }
  }
  EvalReport r;
  for (std::size_t c = 0; c < n_classes; ++c) {
    ClassMetrics m;
    m.support = support[c];
    const double t = static_cast<double>(tp[c]);
    if (tp[c] + fp[c] > 0) m.precision = 100.0 * t / static_cast<double>(tp[c] + fp[c]);
    if (tp[c] + fn[c] > 0) m.recall = 100.0 * t / static_cast<double>(tp[c] + fn[c]);
    if (m.precision + m.recall > 0.0) {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    r.macro_precision += m.precision;
    r.macro_recall += m.recall;
    r.macro_f1 += m.f1;
    r.per_class.push_back(m);
  }
  const double n = static_cast<double>(n_classes);
  r.macro_precision /= n;
  r.macro_recall /= n;
  r.macro_f1 /= n;
  return r;
}

enum class DeltaMode {
  Unrounded,     // use F1 exactly as computed
  RoundedInput,  // round both F1 values to 2 decimals first
};

// (attacked - original) / original * 100, unrounded.
inline double delta_atk(double f1_original, double f1_attacked,
                        DeltaMode mode = DeltaMode::Unrounded) {
  if (mode == DeltaMode::RoundedInput) {
    f1_original = round2(f1_original);
    f1_attacked = round2(f1_attacked);
  }
  if (f1_original == 0.0) throw UndefinedBaselineError("original F1 is zero");
  return (f1_attacked - f1_original) / f1_original * 100.0;
}

// Averaged probabilities closer than this count as tied, so a tie on an
// exact decimal grid does not depend on floating-point summation order.
inline constexpr double kVoteTieTolerance = 1e-12;

struct SoftVote {
  int label = 0;
  std::vector<double> mean;
};

namespace detail {

inline void check_distributions(std::span<const std::vector<double>> probs) {
  if (probs.size() < 2) throw InputError("voting needs at least two models");
  const std::size_t c = probs.front().size();
  if (c == 0) throw InputError("empty probability vector");
  for (const auto& p : probs) {
    if (p.size() != c) throw InputError("models disagree on the class count");
    double total = 0.0;
    for (double v : p) total += v;
    if (std::abs(total - 1.0) > 1e-6) throw InputError("probabilities do not sum to 1");
  }
}

// Lowest index among the entries within kVoteTieTolerance of the maximum,
// considering only entries where `eligible` is true (all when empty).
inline int tolerant_argmax(std::span<const double> v, const std::vector<bool>& eligible = {}) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (eligible.empty() || eligible[k]) top = std::max(top, v[k]);
  }
  for (std::size_t k = 0; k < v.size(); ++k) {
    if ((eligible.empty() || eligible[k]) && v[k] >= top - kVoteTieTolerance) {
      return static_cast<int>(k);
    }
  }
  return 0;
}

}  // namespace detail

inline SoftVote soft_vote(std::span<const std::vector<double>> probabilities) {
  detail::check_distributions(probabilities);
  SoftVote out;
  out.mean.assign(probabilities.front().size(), 0.0);
  for (const auto& p : probabilities) {
    for (std::size_t c = 0; c < p.size(); ++c) out.mean[c] += p[c];
  }
  for (double& v : out.mean) v /= static_cast<double>(probabilities.size());
  out.label = detail::tolerant_argmax(out.mean);
  return out;
}

// Majority vote. On a tie the probabilities of the models that voted for a
// tied class are averaged and the best tied class is taken.
inline int hard_vote(std::span<const int> predictions,
                     std::span<const std::vector<double>> probabilities) {
  detail::check_distributions(probabilities);
  if (predictions.size() != probabilities.size()) {
    throw InputError("predictions and probabilities differ in model count");
  }
  const std::size_t c = probabilities.front().size();
  std::vector<std::size_t> votes(c, 0);
  for (int p : predictions) {
    if (p < 0 || static_cast<std::size_t>(p) >= c) throw InputError("vote outside class range");
    ++votes[static_cast<std::size_t>(p)];
  }
  const std::size_t top = *std::max_element(votes.begin(), votes.end());
  std::vector<bool> tied(c);
  std::size_t n_tied = 0;
  for (std::size_t k = 0; k < c; ++k) {
    tied[k] = votes[k] == top;
    n_tied += tied[k] ? 1 : 0;
  }
  if (n_tied == 1) return static_cast<int>(std::find(tied.begin(), tied.end(), true) - tied.begin());

  std::vector<std::vector<double>> tied_models;
  for (std::size_t m = 0; m < predictions.size(); ++m) {
    if (tied[static_cast<std::size_t>(predictions[m])]) tied_models.push_back(probabilities[m]);
  }
  return detail::tolerant_argmax(soft_vote(tied_models).mean, tied);
}

// Which attacks a test condition was generated with.
enum class AttackScope { All, Insert, Copy, Decompose };

inline std::string scope_label(AttackScope s) {
  switch (s) {
    case AttackScope::All: return "All Attacks";
    case AttackScope::Insert: return "Only Insert";
    case AttackScope::Copy: return "Only Copy";
    case AttackScope::Decompose: return "Only Decompose";
  }
  return "?";
}

inline AttackScope scope_of(AttackFamily f) {
  switch (f) {
    case AttackFamily::Insert: return AttackScope::Insert;
    case AttackFamily::Copy: return AttackScope::Copy;
    case AttackFamily::Decompose: return AttackScope::Decompose;
  }
  return AttackScope::All;
}

struct PredictionSet {
  std::vector<int> labels;
  std::vector<int> predictions;
};

// One report per scope, in the order All, Insert, Copy, Decompose.
inline std::vector<EvalReport> per_attack_breakdown(
    const std::map<AttackScope, PredictionSet>& results, std::size_t n_classes,
    std::optional<double> rate = std::nullopt) {
  std::vector<EvalReport> out;
  for (const auto& [scope, set] : results) {
    auto r = macro_metrics(set.labels, set.predictions, n_classes);
    r.condition = Condition{scope_label(scope), rate};
    out.push_back(std::move(r));
  }
  return out;
}

// One model's cells across conditions plus the attacked-condition average.
struct ReportRow {
  std::string model;
  std::vector<EvalReport> cells;  // original first, then by ascending rate
  std::optional<double> average_f1;
  std::optional<double> average_delta;
};

// Orders cells, fills delta_atk against the original cell and averages the
// attacked cells. Needs exactly one original cell.
inline ReportRow make_report_row(std::string model, std::vector<EvalReport> cells,
                                 DeltaMode mode = DeltaMode::Unrounded) {
  std::stable_sort(cells.begin(), cells.end(), [](const EvalReport& a, const EvalReport& b) {
    return a.condition.attack_rate.value_or(-1.0) < b.condition.attack_rate.value_or(-1.0);
  });
  if (cells.empty() || cells.front().condition.attack_rate ||
      (cells.size() > 1 && !cells[1].condition.attack_rate)) {
    throw InputError("model " + model + " needs exactly one original condition");
  }
  ReportRow row{std::move(model), std::move(cells), std::nullopt, std::nullopt};
  const double base = row.cells.front().macro_f1;
  row.cells.front().delta_atk.reset();
  double f1_sum = 0.0;
  double delta_sum = 0.0;
  for (std::size_t i = 1; i < row.cells.size(); ++i) {
    auto& cell = row.cells[i];
    cell.delta_atk = delta_atk(base, cell.macro_f1, mode);
    f1_sum += cell.macro_f1;
    delta_sum += *cell.delta_atk;
  }
  if (row.cells.size() > 1) {
    const double n = static_cast<double>(row.cells.size() - 1);
    row.average_f1 = f1_sum / n;
    row.average_delta = delta_sum / n;
  }
  return row;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["condition"] = r.condition.label;
  j["attack_rate"] = r.condition.attack_rate ? nlohmann::ordered_json(*r.condition.attack_rate)
                                             : nlohmann::ordered_json(nullptr);
  j["macro_precision"] = r.macro_precision;
  j["macro_recall"] = r.macro_recall;
  j["macro_f1"] = r.macro_f1;
  j["delta_atk"] = r.delta_atk ? nlohmann::ordered_json(*r.delta_atk) : nlohmann::ordered_json(nullptr);
  auto per_class = nlohmann::ordered_json::array();
  for (const auto& c : r.per_class) {
    per_class.push_back({{"precision", c.precision},
                         {"recall", c.recall},
                         {"f1", c.f1},
                         {"support", c.support}});
  }
  j["per_class"] = std::move(per_class);
  return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.condition.label = j.at("condition").get<std::string>();
    if (!j.at("attack_rate").is_null()) r.condition.attack_rate = j.at("attack_rate").get<double>();
    r.macro_precision = j.at("macro_precision").get<double>();
    r.macro_recall = j.at("macro_recall").get<double>();
    r.macro_f1 = j.at("macro_f1").get<double>();
    if (j.contains("delta_atk") && !j.at("delta_atk").is_null()) {
      r.delta_atk = j.at("delta_atk").get<double>();
    }
    for (const auto& c : j.at("per_class")) {
      r.per_class.push_back({c.at("precision").get<double>(), c.at("recall").get<double>(),
                             c.at("f1").get<double>(), c.at("support").get<std::size_t>()});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what(), 0);
  }
}

inline nlohmann::ordered_json to_json(const ReportRow& row) {
  nlohmann::ordered_json j;
  j["model"] = row.model;
  auto cells = nlohmann::ordered_json::array();
  for (const auto& c : row.cells) cells.push_back(to_json(c));
  j["cells"] = std::move(cells);
  j["average_f1"] = row.average_f1 ? nlohmann::ordered_json(*row.average_f1) : nlohmann::ordered_json(nullptr);
  j["average_delta_atk"] =
      row.average_delta ? nlohmann::ordered_json(*row.average_delta) : nlohmann::ordered_json(nullptr);
  return j;
}

namespace detail {

inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", round2(v) + 0.0);
  return buf;
}

inline std::string pad(const std::string& s, std::size_t width, bool left = false) {
  // Column widths count bytes; model names are expected to be ASCII.
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

}  // namespace detail

// Aligned text table: one column group per condition (P, R, F1 and, when
// attacked, delta), then the attacked-condition average F1 and delta.
// Rows are expected to share the same conditions.
inline std::string format_table(std::span<const ReportRow> rows) {
  if (rows.empty()) return "";
  std::size_t name_w = 5;
  for (const auto& r : rows) name_w = std::max(name_w, r.model.size());
  constexpr std::size_t kW = 8;
  const auto& layout = rows.front().cells;

  std::string head1 = detail::pad("", name_w, true) + " |";
  std::string head2 = detail::pad("Model", name_w, true) + " |";
  for (const auto& c : layout) {
    const std::size_t cols = c.condition.attack_rate ? 4 : 3;
    head1 += detail::pad(c.condition.label, cols * kW) + " |";
    head2 += detail::pad("P", kW) + detail::pad("R", kW) + detail::pad("F1", kW);
    if (c.condition.attack_rate) head2 += detail::pad("Δatk", kW + 1);
    head2 += " |";
  }
  const bool has_avg = layout.size() > 1;
  if (has_avg) {
    head1 += detail::pad("Average", 2 * kW);
    head2 += detail::pad("F1", kW) + detail::pad("Δatk", kW + 1);
  }
  std::string out = head1 + "\n" + head2 + "\n" + std::string(head1.size(), '-') + "\n";
  for (const auto& r : rows) {
    std::string line = detail::pad(r.model, name_w, true) + " |";
    for (const auto& c : r.cells) {
      line += detail::pad(detail::fixed2(c.macro_precision), kW) +
              detail::pad(detail::fixed2(c.macro_recall), kW) +
              detail::pad(detail::fixed2(c.macro_f1), kW);
      if (c.condition.attack_rate) {
        line += detail::pad(c.delta_atk ? detail::fixed2(*c.delta_atk) + "%" : "-", kW);
      }
      line += " |";
    }
    if (has_avg) {
      line += detail::pad(r.average_f1 ? detail::fixed2(*r.average_f1) : "-", kW) +
              detail::pad(r.average_delta ? detail::fixed2(*r.average_delta) + "%" : "-", kW);
    }
    out += line + "\n";
  }
  return out;
}

}  // namespace krobust

#endif  // KROBUST_EVAL_HPP_
