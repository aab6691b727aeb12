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

// Command-line front end: split, attack, train, eval, report, experiment and
// synth subcommands over JSONL corpora and layerstack files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "krobust/krobust.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw krobust::InputError("cannot write " + path);
  return out;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw krobust::InputError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw krobust::ParseError(path + ": " + e.what(), 0);
  }
}

krobust::Condition parse_condition(const std::string& s) {
  if (s == "original") return krobust::Condition::original();
  double rate = 0.0;
  try {
    std::size_t used = 0;
    rate = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw krobust::InputError("condition must be 'original' or a rate in [0, 1]: " + s);
  }
  if (rate < 0.0 || rate > 1.0) throw krobust::InputError("condition rate outside [0, 1]: " + s);
  return krobust::Condition::attacked(rate);
}

struct SplitArgs {
  std::string ratios = "8:1:1";
  std::uint64_t seed = 0;
  std::string in;
  std::string out_dir;
};

int run_split(const SplitArgs& a) {
  const auto corpus = krobust::ingest(a.in);
  const auto res = krobust::split(corpus, {krobust::parse_ratios(a.ratios), a.seed});
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  fs::create_directories(a.out_dir);
  for (const auto& [name, part] : {std::pair{"train", &res.train}, std::pair{"val", &res.val},
                                   std::pair{"test", &res.test}}) {
    auto out = open_out((fs::path(a.out_dir) / (std::string(name) + ".jsonl")).string());
    krobust::write_corpus(out, *part);
  }
  std::cout << "train " << res.train.size() << " / val " << res.val.size() << " / test "
            << res.test.size() << "\n";
  return 0;
}

struct AttackArgs {
  double rate = 0.0;
  std::uint64_t seed = 0;
  std::string types = "all";
  std::string copy_final = "move";
  std::string in;
  std::string out;
  std::string log;
};

int run_attack(const AttackArgs& a) {
  krobust::AttackConfig cfg;
  cfg.rate = a.rate;
  cfg.seed = a.seed;
  cfg.enabled = krobust::parse_attack_selection(a.types);
  cfg.copy_final = a.copy_final == "keep" ? krobust::CopyFinalSemantics::CopyKeep
                                          : krobust::CopyFinalSemantics::Move;
  const auto corpus = krobust::ingest(a.in);
  const auto res = krobust::attack_corpus(corpus, cfg);
  auto out = open_out(a.out);
  krobust::write_corpus(out, res.corpus);
  auto log = open_out(a.log);
  krobust::write_attack_log(log, res.log, cfg);
  std::cout << "attacked " << res.log.size() << " words in " << corpus.size() << " sentences\n";
  return 0;
}

struct TrainArgs {
  std::string stacks;
  std::string val;
  std::string strategy = "mean";
  std::string init = "zero";
  double lr = 1e-5;
  int epochs = 5;
  int batch = 32;
  std::uint64_t seed = 0;
  bool freeze = false;
  std::string out;
};

int run_train(const TrainArgs& a) {
  const auto train_file = krobust::read_layerstacks(a.stacks);
  krobust::TrainConfig cfg;
  cfg.learning_rate = a.lr;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.seed = a.seed;
  cfg.strategy = krobust::parse_pooling_strategy(a.strategy);
  cfg.train_pool_weights = !a.freeze;
  const auto init = krobust::parse_weight_init(a.init);
  const auto init_w = cfg.strategy == krobust::PoolingStrategy::Weighted
                          ? krobust::initial_weights(init, train_file.n_layers)
                          : krobust::LayerWeights::zeros(train_file.n_layers);
  auto res = krobust::train(train_file.records, cfg, init_w);
  krobust::ProbeCheckpoint ck{train_file.n_layers, cfg.strategy, res.weights, res.head};
  for (std::size_t e = 0; e < res.loss_curve.size(); ++e) {
    std::cout << "epoch " << e + 1 << " loss " << res.loss_curve[e] << "\n";
  }
  if (!a.val.empty()) {
    const auto val_file = krobust::read_layerstacks(a.val);
    if (val_file.n_layers != train_file.n_layers || val_file.dim != train_file.dim) {
      throw krobust::ShapeError("validation stacks do not match training stacks");
    }
    std::cout << "val loss " << krobust::mean_loss(ck.head, ck.weights, ck.strategy, val_file.records)
              << "\n";
  }
  auto out = open_out(a.out);
  out << krobust::to_json(ck).dump(2) << "\n";
  return 0;
}

struct EvalArgs {
  std::vector<std::string> models;
  std::string stacks;
  std::string report;
  std::string vote = "hard";
  std::string condition = "original";
  std::string name;
};

int run_eval(const EvalArgs& a) {
  std::vector<krobust::ProbeCheckpoint> probes;
  for (const auto& m : a.models) probes.push_back(krobust::checkpoint_from_json(read_json_file(m)));
  const auto file = krobust::read_layerstacks(a.stacks);
  const auto condition = parse_condition(a.condition);
  krobust::Evaluation ev;
  std::string name = a.name;
  if (probes.size() == 1) {
    ev = krobust::evaluate(probes.front(), file.records, condition);
    if (name.empty()) name = std::string(krobust::to_string(probes.front().strategy));
  } else {
    const auto method = a.vote == "soft" ? krobust::VoteMethod::Soft : krobust::VoteMethod::Hard;
    ev = krobust::evaluate_ensemble(probes, file.records, method, condition);
    if (name.empty()) name = std::string("ensemble-") + a.vote;
  }
  ordered_json j;
  j["model"] = name;
  const auto report = krobust::to_json(ev.report);
  for (const auto& [k, v] : report.items()) j[k] = v;
  auto preds = ordered_json::array();
  for (std::size_t i = 0; i < ev.predictions.size(); ++i) {
    preds.push_back({{"id", file.records[i].id},
                     {"label", file.records[i].label},
                     {"prediction", ev.predictions[i].label},
                     {"probabilities", ev.predictions[i].probabilities}});
  }
  j["predictions"] = std::move(preds);
  auto out = open_out(a.report);
  out << j.dump(2) << "\n";
  std::cout << name << " [" << ev.report.condition.label << "] P "
            << krobust::detail::fixed2(ev.report.macro_precision) << " R "
            << krobust::detail::fixed2(ev.report.macro_recall) << " F1 "
            << krobust::detail::fixed2(ev.report.macro_f1) << "\n";
  return 0;
}

void emit_rows(const std::vector<krobust::ReportRow>& rows, const std::string& format,
               const std::string& out_path) {
  std::string text;
  if (format == "json") {
    auto arr = ordered_json::array();
    for (const auto& r : rows) arr.push_back(krobust::to_json(r));
    text = arr.dump(2) + "\n";
  } else {
    text = krobust::format_table(rows);
  }
  if (out_path.empty()) {
    std::cout << text;
  } else {
    auto out = open_out(out_path);
    out << text;
  }
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string format = "table";
  bool rounded = false;
  std::string out;
};

int run_report(const ReportArgs& a) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<krobust::EvalReport>> groups;
  for (const auto& path : a.inputs) {
    const auto j = read_json_file(path);
    const auto model = j.value("model", std::string("model"));
    if (!groups.count(model)) order.push_back(model);
    groups[model].push_back(krobust::report_from_json(j));
  }
  const auto mode = a.rounded ? krobust::DeltaMode::RoundedInput : krobust::DeltaMode::Unrounded;
  std::vector<krobust::ReportRow> rows;
  for (const auto& m : order) rows.push_back(krobust::make_report_row(m, groups[m], mode));
  emit_rows(rows, a.format, a.out);
  return 0;
}

struct ExperimentArgs {
  std::string train;
  std::string val;
  std::string original;
  std::vector<std::string> attacked;  // RATE=PATH
  std::string strategies = "mean,max,weighted,first-last";
  std::string init = "zero";
  double lr = 0.1;
  int epochs = 50;
  int batch = 32;
  std::uint64_t seed = 0;
  std::string prefix;
  std::string format = "table";
  bool rounded = false;
  std::string out;
};

int run_experiment_cmd(const ExperimentArgs& a) {
  const auto train_file = krobust::read_layerstacks(a.train);
  std::vector<krobust::LabeledStack> val;
  if (!a.val.empty()) val = krobust::read_layerstacks(a.val).records;
  std::vector<krobust::ConditionStacks> conditions;
  conditions.push_back({krobust::Condition::original(), krobust::read_layerstacks(a.original).records});
  for (const auto& spec : a.attacked) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw krobust::InputError("--attacked expects RATE=PATH: " + spec);
    conditions.push_back({parse_condition(spec.substr(0, eq)),
                          krobust::read_layerstacks(spec.substr(eq + 1)).records});
  }
  std::vector<krobust::PoolingStrategy> strategies;
  std::stringstream ss(a.strategies);
  for (std::string s; std::getline(ss, s, ',');) {
    if (!s.empty()) strategies.push_back(krobust::parse_pooling_strategy(s));
  }
  krobust::TrainConfig cfg;
  cfg.learning_rate = a.lr;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.seed = a.seed;
  const auto res = krobust::run_experiment(
      train_file.records, val, conditions, strategies, cfg, krobust::parse_weight_init(a.init),
      a.rounded ? krobust::DeltaMode::RoundedInput : krobust::DeltaMode::Unrounded, a.prefix);
  emit_rows(res.rows, a.format, a.out);
  return 0;
}

struct SynthArgs {
  krobust::SyntheticSpec spec;
  double rate = 0.0;
  std::string out;
};

int run_synth(const SynthArgs& a) {
  krobust::LayerstackFile file{a.spec.n_layers, a.spec.dim,
                               krobust::generate_synthetic(a.spec, a.rate)};
  auto out = open_out(a.out);
  krobust::write_layerstacks(out, file);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Korean adversarial attacks and layer-wise pooling probes"};
  app.require_subcommand(1);

  SplitArgs split_args;
  auto* split = app.add_subcommand("split", "Stratified train/val/test split of a JSONL corpus");
  split->add_option("--ratios", split_args.ratios, "train:val:test")->capture_default_str();
  split->add_option("--seed", split_args.seed)->capture_default_str();
  split->add_option("--in", split_args.in)->required();
  split->add_option("--out-dir", split_args.out_dir)->required();

  AttackArgs attack_args;
  auto* attack = app.add_subcommand("attack", "Apply adversarial attacks to a corpus");
  attack->add_option("--rate", attack_args.rate, "Fraction of words to attack")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  attack->add_option("--seed", attack_args.seed)->capture_default_str();
  attack->add_option("--types", attack_args.types, "all|insert|copy|decompose|<comma list>")
      ->capture_default_str();
  attack->add_option("--copy-final", attack_args.copy_final)
      ->check(CLI::IsMember({"move", "keep"}))
      ->capture_default_str();
  attack->add_option("--in", attack_args.in)->required();
  attack->add_option("--out", attack_args.out)->required();
  attack->add_option("--log", attack_args.log)->required();

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a pooling probe on layerstacks");
  train->add_option("--stacks", train_args.stacks)->required();
  train->add_option("--val", train_args.val);
  train->add_option("--strategy", train_args.strategy)
      ->check(CLI::IsMember({"mean", "max", "weighted", "first-last", "last"}))
      ->capture_default_str();
  train->add_option("--init", train_args.init)
      ->check(CLI::IsMember({"zero", "down-up", "up-down"}))
      ->capture_default_str();
  train->add_option("--lr", train_args.lr)->capture_default_str();
  train->add_option("--epochs", train_args.epochs)->capture_default_str();
  train->add_option("--batch", train_args.batch)->capture_default_str();
  train->add_option("--seed", train_args.seed)->capture_default_str();
  train->add_flag("--freeze-pool-weights", train_args.freeze, "Keep weighted-pooling weights fixed");
  train->add_option("--out", train_args.out)->required();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate a probe (or a voting ensemble) on layerstacks");
  eval->add_option("--model", eval_args.models, "Checkpoint; repeat for an ensemble")->required();
  eval->add_option("--stacks", eval_args.stacks)->required();
  eval->add_option("--report", eval_args.report)->required();
  eval->add_option("--vote", eval_args.vote)
      ->check(CLI::IsMember({"hard", "soft"}))
      ->capture_default_str();
  eval->add_option("--condition", eval_args.condition, "original or attack rate")
      ->capture_default_str();
  eval->add_option("--name", eval_args.name, "Model name used to group report rows");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Combine eval reports into a table");
  report->add_option("--inputs", report_args.inputs)->required();
  report->add_option("--format", report_args.format)
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();
  report->add_flag("--rounded-delta", report_args.rounded,
                   "Compute delta from F1 rounded to 2 decimals");
  report->add_option("--out", report_args.out);

  ExperimentArgs exp_args;
  auto* experiment = app.add_subcommand("experiment", "Train and evaluate several strategies");
  experiment->add_option("--train", exp_args.train)->required();
  experiment->add_option("--val", exp_args.val);
  experiment->add_option("--original", exp_args.original)->required();
  experiment->add_option("--attacked", exp_args.attacked, "RATE=PATH, repeatable");
  experiment->add_option("--strategies", exp_args.strategies)->capture_default_str();
  experiment->add_option("--init", exp_args.init)
      ->check(CLI::IsMember({"zero", "down-up", "up-down"}))
      ->capture_default_str();
  experiment->add_option("--lr", exp_args.lr)->capture_default_str();
  experiment->add_option("--epochs", exp_args.epochs)->capture_default_str();
  experiment->add_option("--batch", exp_args.batch)->capture_default_str();
  experiment->add_option("--seed", exp_args.seed)->capture_default_str();
  experiment->add_option("--prefix", exp_args.prefix, "Model name prefix for rows");
  experiment->add_option("--format", exp_args.format)
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();
  experiment->add_flag("--rounded-delta", exp_args.rounded);
  experiment->add_option("--out", exp_args.out);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Write synthetic layerstacks");
  synth->add_option("--n", synth_args.spec.n_examples)->capture_default_str();
  synth->add_option("--layers", synth_args.spec.n_layers)->capture_default_str();
  synth->add_option("--dim", synth_args.spec.dim)->capture_default_str();
  synth->add_option("--classes", synth_args.spec.n_classes)->capture_default_str();
  synth->add_option("--seed", synth_args.spec.seed)->capture_default_str();
  synth->add_option("--code-seed", synth_args.spec.code_seed, "Class codes; keep fixed across splits")
      ->capture_default_str();
  synth->add_option("--rate", synth_args.rate, "Attack rate on the last layer")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  synth->add_option("--prefix", synth_args.spec.id_prefix)->capture_default_str();
  synth->add_option("--out", synth_args.out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*split) return run_split(split_args);
    if (*attack) return run_attack(attack_args);
    if (*train) return run_train(train_args);
    if (*eval) return run_eval(eval_args);
    if (*report) return run_report(report_args);
    if (*experiment) return run_experiment_cmd(exp_args);
    if (*synth) return run_synth(synth_args);
  } catch (const krobust::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
