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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails or runs over its time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fuzz.hpp"
#include "golden_attacks.hpp"
#include "krobust/krobust.hpp"
#include "oracles.hpp"

namespace {

using namespace krobust;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome jamo_round_trip() {
  std::size_t bad = 0;
  for (char32_t c = jamo::kSyllableBase; c <= jamo::kSyllableLast; ++c) {
    if (jamo::compose(*jamo::decompose(c)) != c) ++bad;
  }
  const auto sample = oracle::load_nfd_sample();
  std::size_t nfd_bad = 0;
  for (const auto& e : sample) {
    const auto d = *jamo::decompose(e.syllable);
    const int t = e.jamo.size() == 3 ? static_cast<int>(e.jamo[2] - 0x11A7) : 0;
    if (d.initial_index != static_cast<int>(e.jamo[0] - 0x1100) ||
        d.medial_index != static_cast<int>(e.jamo[1] - 0x1161) || d.final_index != t) {
      ++nfd_bad;
    }
  }
  return {bad == 0 && nfd_bad == 0 && sample.size() == 200,
          std::to_string(jamo::kSyllableCount - bad) + "/11172 round-trip, " +
              std::to_string(sample.size() - nfd_bad) + "/" + std::to_string(sample.size()) +
              " agree with NFD"};
}

Outcome golden_corpus() {
  std::size_t ok = 0;
  std::string first_miss;
  for (const auto& c : golden::kCases) {
    const auto e = attack_edit(utf8::decode(c.word), c.type, c.index, c.payload, c.semantics);
    if (e && utf8::encode(e->word) == c.expected) {
      ++ok;
    } else if (first_miss.empty()) {
      first_miss = std::string(", first miss ") + c.expected;
    }
  }
  return {ok == golden::kCases.size(),
          std::to_string(ok) + "/" + std::to_string(golden::kCases.size()) +
              " golden forms byte-exact" + first_miss};
}

// round_half_up(tenths / 10 * w) in integers.
std::size_t expected_targets(unsigned tenths, std::size_t w) { return (tenths * w + 5) / 10; }

bool has_syllable(const std::string& word) {
  for (char32_t c : utf8::decode(word)) {
    if (jamo::is_syllable(c)) return true;
  }
  return false;
}

Outcome scheduler() {
  std::size_t checked = 0, mismatched = 0, nondeterministic = 0;
  for (unsigned tenths : {3u, 6u, 9u}) {
    Rng gen(1000 + tenths);
    for (int s = 0; s < 1000; ++s) {
      const auto sentence = fuzz::sentence(gen);
      const auto words = split_words(sentence);
      AttackConfig cfg;
      cfg.rate = tenths / 10.0;
      cfg.seed = static_cast<std::uint64_t>(s);
      // Every word admits a special-character insert, so all words qualify.
      Rng a(derive_seed(cfg.seed, 0)), b(derive_seed(cfg.seed, 0));
      const auto ra = apply_attacks(sentence, cfg, a);
      const auto rb = apply_attacks(sentence, cfg, b);
      if (ra.text != rb.text || ra.log != rb.log) ++nondeterministic;
      if (ra.log.size() != expected_targets(tenths, words.size())) ++mismatched;
      ++checked;
      // Decompose only: a word qualifies iff it holds a Hangul syllable.
      cfg.enabled = {AttackType::DecomposeFinal, AttackType::DecomposeAll};
      std::size_t attackable = 0;
      for (const auto& w : words) attackable += has_syllable(w) ? 1 : 0;
      Rng c(derive_seed(cfg.seed, 1));
      const auto rc = apply_attacks(sentence, cfg, c);
      if (rc.log.size() != std::min(expected_targets(tenths, words.size()), attackable)) {
        ++mismatched;
      }
      ++checked;
    }
  }
  // Corpus level: same seed gives byte-identical JSONL and logs.
  Rng gen(77);
  Corpus corpus;
  for (int i = 0; i < 300; ++i) corpus.push_back({"s" + std::to_string(i), fuzz::sentence(gen), i % 2});
  AttackConfig cfg;
  cfg.rate = 0.6;
  cfg.seed = 20240521;
  std::ostringstream t1, t2, l1, l2;
  const auto r1 = attack_corpus(corpus, cfg);
  const auto r2 = attack_corpus(corpus, cfg);
  write_corpus(t1, r1.corpus);
  write_corpus(t2, r2.corpus);
  write_attack_log(l1, r1.log, cfg);
  write_attack_log(l2, r2.log, cfg);
  const bool corpus_same = t1.str() == t2.str() && l1.str() == l2.str();
  return {mismatched == 0 && nondeterministic == 0 && corpus_same,
          std::to_string(checked - mismatched) + "/" + std::to_string(checked) +
              " runs hit round_half_up(rate*W), " + std::to_string(nondeterministic) +
              " nondeterministic, corpus rerun " + (corpus_same ? "byte-identical" : "differs")};
}

Outcome pooling_identities() {
  Rng rng(31);
  double worst_weighted = 0.0;
  std::size_t failures = 0;
  for (int t = 0; t < 100; ++t) {
    const auto s = oracle::random_stack(rng);
    const auto mean = oracle::naive_mean(s);
    const auto zero = pool_weighted(s, LayerWeights::zeros(12));
    const auto fl = pool_first_last(s);
    const auto mx = pool_max(s);
    std::vector<double> raw(12);
    for (double& v : raw) v = 3 * rng.normal();
    const auto w = pool_weighted(s, LayerWeights{raw});
    for (std::size_t m = 0; m < 16; ++m) {
      worst_weighted = std::max(worst_weighted, std::abs(zero[m] - mean[m]));
      if (fl[m] != s(0, m) + s(11, m)) ++failures;
      if (mx[m] < mean[m]) ++failures;
      double lo = s(0, m), hi = s(0, m);
      for (std::size_t i = 1; i < 12; ++i) {
        lo = std::min(lo, s(i, m));
        hi = std::max(hi, s(i, m));
      }
      if (w[m] < lo - 1e-12 || w[m] > hi + 1e-12) ++failures;
    }
  }
  return {worst_weighted <= 1e-9 && failures == 0,
          "max |zero-weighted - mean| " + fmt("%.1e", worst_weighted) + ", " +
              std::to_string(failures) + " first-last/max/hull violations"};
}

double max_rel_err(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double worst = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    worst = std::max(worst, oracle::rel_err(analytic[k], numeric[k]));
  }
  return worst;
}

Outcome gradient_checks() {
  Rng rng(47);
  double worst = 0.0;
  const std::vector<PoolingStrategy> poolings{PoolingStrategy::Mean, PoolingStrategy::Max,
                                              PoolingStrategy::Weighted,
                                              PoolingStrategy::FirstLast};
  for (int t = 0; t < 100; ++t) {
    // Pooling backward against L = <u, pool(stack)>.
    for (PoolingStrategy strategy : poolings) {
      auto s = oracle::random_stack(rng);
      LayerWeights w{std::vector<double>(12)};
      for (double& v : w.raw) v = rng.normal();
      std::vector<double> u(16);
      for (double& v : u) v = rng.normal();
      auto loss = [&] {
        const auto p = pool(s, strategy, w);
        double total = 0;
        for (std::size_t m = 0; m < 16; ++m) total += u[m] * p[m];
        return total;
      };
      const auto g = pool_backward(s, w, strategy, u);
      std::vector<double> analytic, numeric;
      for (std::size_t k = 0; k < s.values().size(); ++k) {
        analytic.push_back(g.stack.values()[k]);
        numeric.push_back(oracle::central_diff(loss, s.values()[k]));
      }
      if (strategy == PoolingStrategy::Weighted) {
        for (std::size_t i = 0; i < 12; ++i) {
          analytic.push_back((*g.raw)[i]);
          numeric.push_back(oracle::central_diff(loss, w.raw[i]));
        }
      }
      worst = std::max(worst, max_rel_err(analytic, numeric));
    }
    // Full probe: cross-entropy through head and weighted pooling.
    auto s = oracle::random_stack(rng);
    LayerWeights w{std::vector<double>(12)};
    for (double& v : w.raw) v = rng.normal();
    auto head = LinearHead::zeros(3, 16);
    for (double& v : head.weight) v = 0.3 * rng.normal();
    for (double& v : head.bias) v = rng.normal();
    const int label = static_cast<int>(rng.below(3));
    auto loss = [&] {
      const auto p = forward(head, pool(s, PoolingStrategy::Weighted, w));
      return -std::log(p[static_cast<std::size_t>(label)]);
    };
    const auto g = probe_gradients(head, w, PoolingStrategy::Weighted, s, label);
    std::vector<double> analytic, numeric;
    for (std::size_t k = 0; k < head.weight.size(); ++k) {
      analytic.push_back(g.weight[k]);
      numeric.push_back(oracle::central_diff(loss, head.weight[k]));
    }
    for (std::size_t k = 0; k < head.bias.size(); ++k) {
      analytic.push_back(g.bias[k]);
      numeric.push_back(oracle::central_diff(loss, head.bias[k]));
    }
    for (std::size_t i = 0; i < 12; ++i) {
      analytic.push_back((*g.raw)[i]);
      numeric.push_back(oracle::central_diff(loss, w.raw[i]));
    }
    for (std::size_t k = 0; k < s.values().size(); ++k) {
      analytic.push_back(g.stack.values()[k]);
      numeric.push_back(oracle::central_diff(loss, s.values()[k]));
    }
    worst = std::max(worst, max_rel_err(analytic, numeric));
  }
  return {worst < 1e-4, "max relative error " + fmt("%.2e", worst) +
                            " over 100 x (mean, max, weighted, first-last, probe)"};
}

Outcome delta_reproduction() {
  struct Row {
    double original, attacked, printed;
  };
  const Row rows[] = {{78.64, 62.44, -20.60}, {79.64, 66.96, -15.92}, {79.21, 65.49, -17.32}};
  double worst = 0.0;
  std::string values;
  for (const auto& r : rows) {
    const double d = delta_atk(r.original, r.attacked, DeltaMode::RoundedInput);
    worst = std::max(worst, std::abs(d - r.printed));
    values += (values.empty() ? "" : ", ") + fmt("%.4f", d);
  }
  return {worst <= 0.01, values + " (max deviation " + fmt("%.4f", worst) + ")"};
}

Outcome table_average() {
  auto cell = [](std::optional<double> rate, double f1) {
    EvalReport r;
    r.condition = rate ? Condition::attacked(*rate) : Condition::original();
    r.macro_f1 = f1;
    return r;
  };
  const auto row = make_report_row(
      "first-last",
      {cell(std::nullopt, 79.21), cell(0.3, 77.02), cell(0.6, 71.21), cell(0.9, 65.49)},
      DeltaMode::RoundedInput);
  const double avg = row.average_f1.value_or(NAN);
  return {std::abs(avg - 71.24) <= 0.01, "average F1 " + fmt("%.4f", avg)};
}

Outcome voting_grid() {
  std::size_t cases = 0, wrong = 0, fallbacks = 0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const std::vector<std::vector<double>> p{{i / 20.0, 1 - i / 20.0}, {j / 20.0, 1 - j / 20.0}};
      // Exact oracle in twentieths; ties go to class 0.
      const int vote_i = 2 * i >= 20 ? 0 : 1;
      const int vote_j = 2 * j >= 20 ? 0 : 1;
      const int soft = i + j >= 20 ? 0 : 1;
      // Disagreement is a 1-1 tie between both classes, so the fallback
      // averages both models over both classes, which is the soft vote.
      const int hard = vote_i == vote_j ? vote_i : soft;
      fallbacks += vote_i != vote_j ? 1 : 0;
      const std::vector<int> votes{vote_i, vote_j};
      if (soft_vote(p).label != soft) ++wrong;
      if (hard_vote(votes, p) != hard) ++wrong;
      ++cases;
    }
  }
  return {wrong == 0 && fallbacks > 0,
          std::to_string(cases) + " grid points, " + std::to_string(fallbacks) +
              " tie fallbacks, " + std::to_string(wrong) + " mismatches"};
}

Outcome synthetic_robustness() {
  SyntheticSpec spec;  // 12 x 16, token signal in layer 1, semantic in layer 12
  spec.n_examples = 2000;
  spec.seed = 101;
  const auto train_set = generate_synthetic(spec);
  SyntheticSpec val_spec = spec;
  val_spec.n_examples = 500;
  val_spec.seed = 102;
  const auto val_set = generate_synthetic(val_spec);
  SyntheticSpec test_spec = spec;
  test_spec.n_examples = 2000;
  test_spec.seed = 103;
  std::vector<ConditionStacks> conditions{{Condition::original(), generate_synthetic(test_spec)}};
  for (double rate : {0.3, 0.6, 0.9}) {
    conditions.push_back({Condition::attacked(rate), generate_synthetic(test_spec, rate)});
  }
  const std::vector<PoolingStrategy> strategies{PoolingStrategy::Mean, PoolingStrategy::Max,
                                                PoolingStrategy::Weighted,
                                                PoolingStrategy::FirstLast, PoolingStrategy::Last};
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.epochs = 30;
  cfg.batch_size = 32;
  cfg.seed = 7;
  const auto result = run_experiment(train_set, val_set, conditions, strategies, cfg);
  bool monotone = true;
  std::string cells;
  for (const auto& row : result.rows) {
    cells += " " + row.model + "[";
    for (std::size_t k = 0; k < row.cells.size(); ++k) {
      if (k > 0 && row.cells[k].macro_f1 > row.cells[k - 1].macro_f1) monotone = false;
      cells += (k ? " " : "") + fmt("%.2f", row.cells[k].macro_f1);
    }
    cells += "]";
  }
  const double fl = result.rows[3].cells[2].macro_f1;
  const double last = result.rows[4].cells[2].macro_f1;
  return {monotone && fl >= last + 2.0,
          "first-last - last at 60%: " + fmt("%+.2f", fl - last) + ", monotone " +
              (monotone ? "yes" : "no") + ";" + cells};
}

struct Criterion {
  const char* name;
  double budget_s;
  Outcome (*run)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"jamo round-trip and NFD agreement", 1.0, jamo_round_trip},
      {"golden attack corpus", 1.0, golden_corpus},
      {"scheduler counts and determinism", 5.0, scheduler},
      {"pooling identities", 1.0, pooling_identities},
      {"gradient checks", 10.0, gradient_checks},
      {"delta_atk reproduction", 1.0, delta_reproduction},
      {"attacked-condition averaging", 1.0, table_average},
      {"voting grid", 1.0, voting_grid},
      {"synthetic robustness property", 30.0, synthetic_robustness},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = out.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s  %s: %s (%.2f s of %.0f s)\n", pass ? "PASS" : "FAIL", c.name,
                out.detail.c_str(), secs, c.budget_s);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
