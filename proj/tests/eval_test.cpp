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

#include "krobust/eval.hpp"

#include <algorithm>

#include <gtest/gtest.h>

#include "krobust/random.hpp"

namespace krobust {
namespace {

TEST(MacroMetricsTest, HandEnumeratedExample) {
  const std::vector<int> y{0, 0, 1, 1};
  const std::vector<int> p{0, 1, 1, 1};
  const auto r = macro_metrics(y, p, 2);
  // Confusion matrix: class 0 TP=1 FP=0 FN=1; class 1 TP=2 FP=1 FN=0.
  EXPECT_NEAR(r.per_class[0].precision, 100.0, 1e-12);
  EXPECT_NEAR(r.per_class[0].recall, 50.0, 1e-12);
  EXPECT_NEAR(r.per_class[0].f1, 200.0 / 3.0, 1e-9);
  EXPECT_NEAR(r.per_class[1].precision, 200.0 / 3.0, 1e-9);
  EXPECT_NEAR(r.per_class[1].recall, 100.0, 1e-12);
  EXPECT_NEAR(r.per_class[1].f1, 80.0, 1e-9);
  EXPECT_NEAR(r.macro_f1, (200.0 / 3.0 + 80.0) / 2.0, 1e-9);
  EXPECT_EQ(detail::fixed2(r.macro_f1), "73.33");
  EXPECT_EQ(r.per_class[0].support, 2u);
  EXPECT_FALSE(r.delta_atk.has_value());
}

TEST(MacroMetricsTest, PerfectAndDegenerate) {
  const std::vector<int> y{0, 1, 2, 1, 0};
  const auto perfect = macro_metrics(y, y, 3);
  for (const auto& c : perfect.per_class) {
    EXPECT_EQ(c.precision, 100.0);
    EXPECT_EQ(c.recall, 100.0);
    EXPECT_EQ(c.f1, 100.0);
  }
  EXPECT_EQ(perfect.macro_f1, 100.0);

  const std::vector<int> labels{0, 0, 0, 1, 1};
  const std::vector<int> ones(5, 1);
  const auto r = macro_metrics(labels, ones, 2);
  EXPECT_EQ(r.per_class[0].precision, 0.0);
  EXPECT_EQ(r.per_class[0].recall, 0.0);
  EXPECT_EQ(r.per_class[0].f1, 0.0);
  EXPECT_NEAR(r.per_class[1].precision, 40.0, 1e-12);
  EXPECT_EQ(r.per_class[1].recall, 100.0);
  EXPECT_NEAR(r.per_class[1].f1, 2 * 40.0 * 100.0 / 140.0, 1e-9);
  EXPECT_LT(r.macro_f1, 100.0);
  // Class 2 is absent from both but still counts in the mean.
  const auto three = macro_metrics(labels, labels, 3);
  EXPECT_NEAR(three.macro_f1, 200.0 / 3.0, 1e-9);
}

TEST(MacroMetricsTest, Errors) {
  const std::vector<int> a{0, 1};
  const std::vector<int> b{0};
  EXPECT_THROW(macro_metrics(a, b, 2), InputError);
  const std::vector<int> c{0, 2};
  EXPECT_THROW(macro_metrics(a, c, 2), InputError);
  EXPECT_THROW(macro_metrics(c, a, 2), InputError);
}

TEST(MacroMetricsTest, PermutationInvariantAndMeanOfClasses) {
  Rng rng(10);
  for (int t = 0; t < 20; ++t) {
    std::vector<int> y(100), p(100);
    for (int i = 0; i < 100; ++i) {
      y[i] = static_cast<int>(rng.below(3));
      p[i] = rng.below(4) == 0 ? static_cast<int>(rng.below(3)) : y[i];
    }
    const auto r = macro_metrics(y, p, 3);
    std::vector<std::size_t> idx(100);
    for (std::size_t i = 0; i < 100; ++i) idx[i] = i;
    for (std::size_t i = 0; i + 1 < 100; ++i) std::swap(idx[i], idx[i + rng.below(100 - i)]);
    std::vector<int> y2, p2;
    for (auto i : idx) {
      y2.push_back(y[i]);
      p2.push_back(p[i]);
    }
    const auto s = macro_metrics(y2, p2, 3);
    EXPECT_DOUBLE_EQ(r.macro_f1, s.macro_f1);
    EXPECT_DOUBLE_EQ(r.macro_precision, s.macro_precision);
    double f = 0;
    for (const auto& c : r.per_class) {
      f += c.f1;
      EXPECT_GE(c.f1, 0.0);
      EXPECT_LE(c.f1, 100.0);
    }
    EXPECT_NEAR(r.macro_f1, f / 3, 1e-9);
  }
}

TEST(DeltaAtkTest, TableValues) {
  EXPECT_NEAR(round2(delta_atk(78.64, 62.44, DeltaMode::RoundedInput)), -20.60, 1e-9);
  EXPECT_NEAR(round2(delta_atk(79.64, 66.96, DeltaMode::RoundedInput)), -15.92, 1e-9);
  EXPECT_NEAR(round2(delta_atk(79.21, 65.49, DeltaMode::RoundedInput)), -17.32, 1e-9);
  EXPECT_EQ(delta_atk(55.5, 55.5), 0.0);
  EXPECT_THROW(delta_atk(0.0, 10.0), UndefinedBaselineError);
  // Rounded mode rounds the inputs first.
  EXPECT_EQ(delta_atk(50.004, 40.0, DeltaMode::RoundedInput), delta_atk(50.0, 40.0));
  EXPECT_NE(delta_atk(50.004, 40.0), delta_atk(50.0, 40.0));
}

TEST(VoteTest, Examples) {
  const std::vector<std::vector<double>> three{{0.2, 0.8}, {0.4, 0.6}, {0.9, 0.1}};
  EXPECT_EQ(hard_vote(std::vector<int>{1, 1, 0}, three), 1);
  const std::vector<std::vector<double>> two{{0.6, 0.4}, {0.3, 0.7}};
  EXPECT_EQ(hard_vote(std::vector<int>{0, 1}, two), 1);
  const auto s = soft_vote(two);
  EXPECT_NEAR(s.mean[0], 0.45, 1e-12);
  EXPECT_NEAR(s.mean[1], 0.55, 1e-12);
  const std::vector<std::vector<double>> split{{1, 0}, {0, 1}};
  EXPECT_EQ(soft_vote(split).label, 0);
  EXPECT_EQ(hard_vote(std::vector<int>{0, 1}, split), 0);
  const std::vector<std::vector<double>> same{{0.1, 0.7, 0.2}, {0.1, 0.7, 0.2}};
  EXPECT_EQ(soft_vote(same).label, 1);
  EXPECT_EQ(hard_vote(std::vector<int>{1, 1}, same), 1);
}

TEST(VoteTest, TieRestrictedToTiedClasses) {
  // Models 0 and 1 tie between classes 0 and 1; class 2 has the largest
  // averaged mass but received no vote.
  const std::vector<std::vector<double>> p{{0.4, 0.0, 0.6}, {0.0, 0.45, 0.55}};
  EXPECT_EQ(soft_vote(p).label, 2);
  EXPECT_EQ(hard_vote(std::vector<int>{0, 1}, p), 1);  // 0.225 > 0.2
}

TEST(VoteTest, DecimalTiesGoToLowestClass) {
  for (int i = 0; i <= 20; ++i) {
    const std::vector<std::vector<double>> p{{i / 20.0, 1 - i / 20.0},
                                             {(20 - i) / 20.0, 1 - (20 - i) / 20.0}};
    EXPECT_EQ(soft_vote(p).label, 0) << i;
  }
  const std::vector<std::vector<double>> q{{0.1, 0.2, 0.7}, {0.3, 0.2, 0.5}, {0.2, 0.2, 0.6}};
  EXPECT_EQ(soft_vote(q).label, 2);
}

TEST(VoteTest, Errors) {
  const std::vector<std::vector<double>> one{{0.5, 0.5}};
  EXPECT_THROW(soft_vote(one), InputError);
  const std::vector<std::vector<double>> ragged{{0.5, 0.5}, {1.0}};
  EXPECT_THROW(soft_vote(ragged), InputError);
  const std::vector<std::vector<double>> unnormalized{{0.5, 0.6}, {0.5, 0.5}};
  EXPECT_THROW(soft_vote(unnormalized), InputError);
  const std::vector<std::vector<double>> ok{{0.5, 0.5}, {0.5, 0.5}};
  EXPECT_THROW(hard_vote(std::vector<int>{0}, ok), InputError);
  EXPECT_THROW(hard_vote(std::vector<int>{0, 2}, ok), InputError);
}

TEST(VoteTest, OddBinaryEnsemblesNeverTie) {
  Rng rng(4);
  for (int t = 0; t < 500; ++t) {
    const std::size_t models = 3 + 2 * rng.below(3);
    std::vector<int> votes;
    std::vector<std::vector<double>> probs;
    for (std::size_t m = 0; m < models; ++m) {
      const double a = rng.uniform();
      probs.push_back({a, 1 - a});
      votes.push_back(a >= 0.5 ? 0 : 1);
    }
    int ones = 0;
    for (int v : votes) ones += v;
    EXPECT_EQ(hard_vote(votes, probs), 2 * ones > static_cast<int>(models) ? 1 : 0);
  }
}

TEST(VoteTest, SharedScalingKeepsSoftChoice) {
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::vector<double>> p(3, std::vector<double>(4));
    for (auto& v : p) {
      double total = 0;
      for (double& x : v) total += (x = rng.uniform() + 1e-3);
      for (double& x : v) x /= total;
    }
    auto q = p;
    const double k = 0.1 + 5 * rng.uniform();
    for (auto& v : q) {
      double total = 0;
      for (double& x : v) total += (x *= k);
      for (double& x : v) x /= total;
    }
    EXPECT_EQ(soft_vote(p).label, soft_vote(q).label);
  }
}

TEST(BreakdownTest, LabelsAndRecomputation) {
  std::map<AttackScope, PredictionSet> results;
  EXPECT_TRUE(per_attack_breakdown(results, 2).empty());
  results[AttackScope::Decompose] = {{0, 1, 1, 0}, {0, 0, 1, 0}};
  results[AttackScope::Insert] = {{0, 1, 1, 0}, {0, 1, 1, 0}};
  results[AttackScope::All] = {{0, 1, 1, 0}, {1, 1, 1, 0}};
  const auto table = per_attack_breakdown(results, 2, 0.6);
  ASSERT_EQ(table.size(), 3u);
  EXPECT_EQ(table[0].condition.label, "All Attacks");
  EXPECT_EQ(table[1].condition.label, "Only Insert");
  EXPECT_EQ(table[2].condition.label, "Only Decompose");
  EXPECT_EQ(table[1].macro_f1, 100.0);
  EXPECT_EQ(*table[2].condition.attack_rate, 0.6);
  for (const auto& rep : table) {
    const auto& set = results.at(rep.condition.label == "All Attacks" ? AttackScope::All
                                 : rep.condition.label == "Only Insert" ? AttackScope::Insert
                                                                        : AttackScope::Decompose);
    EXPECT_EQ(macro_metrics(set.labels, set.predictions, 2).macro_f1, rep.macro_f1);
  }
  EXPECT_EQ(scope_label(scope_of(AttackFamily::Copy)), "Only Copy");
}

EvalReport cell(std::optional<double> rate, double f1) {
  EvalReport r;
  r.condition = rate ? Condition::attacked(*rate) : Condition::original();
  r.macro_f1 = f1;
  r.macro_precision = f1 + 1;
  r.macro_recall = f1 - 1;
  return r;
}

TEST(ReportRowTest, AveragesAttackedCells) {
  auto row = make_report_row("first-last",
                             {cell(0.9, 65.49), cell(std::nullopt, 79.21), cell(0.3, 77.02),
                              cell(0.6, 71.21)},
                             DeltaMode::RoundedInput);
  ASSERT_EQ(row.cells.size(), 4u);
  EXPECT_EQ(row.cells[0].condition.label, "Original");
  EXPECT_EQ(row.cells[1].condition.label, "30% Attacked");
  EXPECT_EQ(row.cells[3].condition.label, "90% Attacked");
  EXPECT_FALSE(row.cells[0].delta_atk);
  EXPECT_NEAR(round2(*row.cells[1].delta_atk), -2.76, 1e-9);
  EXPECT_NEAR(round2(*row.cells[2].delta_atk), -10.10, 1e-9);
  EXPECT_NEAR(round2(*row.cells[3].delta_atk), -17.32, 1e-9);
  EXPECT_NEAR(*row.average_f1, (77.02 + 71.21 + 65.49) / 3, 1e-9);
  EXPECT_NEAR(round2(*row.average_f1), 71.24, 1e-9);
  EXPECT_NEAR(*row.average_delta,
              (*row.cells[1].delta_atk + *row.cells[2].delta_atk + *row.cells[3].delta_atk) / 3,
              1e-12);
  EXPECT_THROW(make_report_row("x", {cell(0.3, 50)}), InputError);
  EXPECT_THROW(make_report_row("x", {cell(std::nullopt, 50), cell(std::nullopt, 40)}), InputError);
  const auto only = make_report_row("x", {cell(std::nullopt, 50)});
  EXPECT_FALSE(only.average_f1);
}

TEST(ReportRowTest, TableAndJson) {
  std::vector<ReportRow> rows{
      make_report_row("mean", {cell(std::nullopt, 79.01), cell(0.3, 75.70)}),
      make_report_row("first-last", {cell(std::nullopt, 79.21), cell(0.3, 77.02)})};
  const auto text = format_table(rows);
  EXPECT_NE(text.find("Original"), std::string::npos);
  EXPECT_NE(text.find("30% Attacked"), std::string::npos);
  EXPECT_NE(text.find("Average"), std::string::npos);
  EXPECT_NE(text.find("79.21"), std::string::npos);
  EXPECT_NE(text.find("-2.76%"), std::string::npos);
  EXPECT_NE(text.find("-4.19%"), std::string::npos);  // (75.70 - 79.01) / 79.01
  const auto j = to_json(rows[1]);
  EXPECT_EQ(j["model"], "first-last");
  EXPECT_TRUE(j["cells"][0]["delta_atk"].is_null());
  const auto back = report_from_json(nlohmann::json::parse(j["cells"][1].dump()));
  EXPECT_EQ(back.condition.label, "30% Attacked");
  EXPECT_EQ(back.macro_f1, 77.02);
  EXPECT_EQ(*back.delta_atk, *rows[1].cells[1].delta_atk);
  EXPECT_THROW(report_from_json(nlohmann::json::parse("{}")), ParseError);
}

}  // namespace
}  // namespace krobust
