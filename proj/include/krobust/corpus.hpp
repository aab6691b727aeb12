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

// JSONL corpora, the stratified train/val/test split and corpus-level attack
// application with its replayable log.

#ifndef KROBUST_CORPUS_HPP_
#define KROBUST_CORPUS_HPP_

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "krobust/attack.hpp"
#include "krobust/error.hpp"
#include "krobust/random.hpp"

namespace krobust {

struct LabeledExample {
  std::string id;
  std::string text;
  int label = 0;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

using Corpus = std::vector<LabeledExample>;

inline LabeledExample parse_example(std::string_view line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw ParseError("expected a JSON object", line_no);
  for (const char* key : {"id", "text", "label"}) {
    if (!j.contains(key)) throw ParseError(std::string("missing \"") + key + "\"", line_no);
  }
  if (!j["id"].is_string()) throw ParseError("\"id\" must be a string", line_no);
  if (!j["text"].is_string()) throw ParseError("\"text\" must be a string", line_no);
  if (!j["label"].is_number_integer()) throw ParseError("\"label\" must be an integer", line_no);
  LabeledExample ex{j["id"].get<std::string>(), j["text"].get<std::string>(),
                    j["label"].get<int>()};
  if (ex.text.empty()) throw ParseError("\"text\" is empty", line_no);
  if (ex.label < 0) throw ParseError("\"label\" is negative", line_no);
  return ex;
}

// One object per line; blank lines are skipped. Duplicate ids are rejected.
inline Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto ex = parse_example(line, line_no);
    if (!seen.insert(ex.id).second) {
      throw IntegrityError("line " + std::to_string(line_no) + ": duplicate id \"" + ex.id + "\"");
    }
    corpus.push_back(std::move(ex));
  }
  return corpus;
}

inline Corpus ingest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open corpus " + path);
  return read_corpus(in);
}

inline std::string to_jsonl_line(const LabeledExample& ex) {
  nlohmann::ordered_json j;
  j["id"] = ex.id;
  j["text"] = ex.text;
  j["label"] = ex.label;
  return j.dump() + "\n";
}

inline void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& ex : corpus) out << to_jsonl_line(ex);
}

// ---------------------------------------------------------------------------
// Stratified split

struct SplitSpec {
  std::array<unsigned, 3> ratios{8, 1, 1};  // train : val : test
  std::uint64_t seed = 0;
};

inline std::array<unsigned, 3> parse_ratios(std::string_view text) {
  std::array<unsigned, 3> out{};
  std::size_t part = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  while (true) {
    if (part == 3) throw InputError("ratios need exactly three parts: " + std::string(text));
    auto [next, ec] = std::from_chars(p, end, out[part]);
    if (ec != std::errc() || next == p) throw InputError("bad ratios: " + std::string(text));
    ++part;
    p = next;
    if (p == end) break;
    if (*p != ':') throw InputError("bad ratios: " + std::string(text));
    ++p;
  }
  if (part != 3 || out[0] + out[1] + out[2] == 0) {
    throw InputError("bad ratios: " + std::string(text));
  }
  return out;
}

struct SplitResult {
  Corpus train;
  Corpus val;
  Corpus test;
  std::vector<std::string> warnings;
};

// Split sizes: floor of each share, then the leftover one at a time to
// train, val, test in that order.
inline std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<unsigned, 3>& ratios) {
  const std::size_t total = ratios[0] + ratios[1] + ratios[2];
  std::array<std::size_t, 3> sizes{};
  std::size_t used = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    sizes[k] = n * ratios[k] / total;
    used += sizes[k];
  }
  for (std::size_t k = 0; used < n; k = (k + 1) % 3) {
    if (ratios[k] == 0) continue;
    ++sizes[k];
    ++used;
  }
  return sizes;
}

namespace detail {

// Per-label split quotas. Each cell is the floor or the ceiling of
// counts[l] * sizes[k] / n, rows sum to the label counts and columns to the
// split sizes. Ceilings go to the largest remainders first; whatever the
// greedy pass leaves open is settled by augmenting paths, which always
// succeed because the exact fractional table is itself a feasible flow.
inline std::vector<std::array<std::size_t, 3>> quota_table(
    const std::vector<std::size_t>& counts, const std::array<std::size_t, 3>& sizes,
    std::size_t n) {
  const std::size_t L = counts.size();
  std::vector<std::array<std::size_t, 3>> q(L);
  std::vector<std::array<bool, 3>> up(L, {false, false, false});
  std::vector<std::size_t> row_need(L);
  std::array<std::size_t, 3> col_need = sizes;
  struct Cell {
    std::size_t rem, l, k;
  };
  std::vector<Cell> cells;
  for (std::size_t l = 0; l < L; ++l) {
    std::size_t used = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      q[l][k] = counts[l] * sizes[k] / n;
      used += q[l][k];
      col_need[k] -= q[l][k];
      const std::size_t rem = counts[l] * sizes[k] % n;
      if (rem > 0) cells.push_back({rem, l, k});
    }
    row_need[l] = counts[l] - used;
  }
  std::stable_sort(cells.begin(), cells.end(),
                   [](const Cell& a, const Cell& b) { return a.rem > b.rem; });
  auto allowed = [&](std::size_t l, std::size_t k) {
    return counts[l] * sizes[k] % n != 0;
  };
  for (const auto& c : cells) {
    if (row_need[c.l] > 0 && col_need[c.k] > 0) {
      up[c.l][c.k] = true;
      --row_need[c.l];
      --col_need[c.k];
    }
  }
  // Nodes 0..L-1 are labels, L..L+2 are splits.
  for (std::size_t src = 0; src < L; ++src) {
    while (row_need[src] > 0) {
      std::vector<std::ptrdiff_t> prev(L + 3, -1);
      std::vector<std::size_t> queue{src};
      prev[src] = static_cast<std::ptrdiff_t>(src);
      std::ptrdiff_t found = -1;
      for (std::size_t head = 0; head < queue.size() && found < 0; ++head) {
        const std::size_t v = queue[head];
        if (v < L) {
          for (std::size_t k = 0; k < 3; ++k) {
            const std::size_t w = L + k;
            if (prev[w] >= 0 || up[v][k] || !allowed(v, k)) continue;
            prev[w] = static_cast<std::ptrdiff_t>(v);
            if (col_need[k] > 0) {
              found = static_cast<std::ptrdiff_t>(w);
              break;
            }
            queue.push_back(w);
          }
        } else {
          const std::size_t k = v - L;
          for (std::size_t l = 0; l < L; ++l) {
            if (prev[l] >= 0 || !up[l][k]) continue;
            prev[l] = static_cast<std::ptrdiff_t>(v);
            queue.push_back(l);
          }
        }
      }
      if (found < 0) throw IntegrityError("no stratified split satisfies the quotas");
      --col_need[static_cast<std::size_t>(found) - L];
      --row_need[src];
      for (auto w = static_cast<std::size_t>(found); w != src;) {
        const auto v = static_cast<std::size_t>(prev[w]);
        if (w >= L) {
          up[v][w - L] = true;  // label v gains a ceiling in split w
        } else {
          up[w][v - L] = false;  // label w gives one back to split v
        }
        w = v;
      }
    }
  }
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t k = 0; k < 3; ++k) q[l][k] += up[l][k] ? 1 : 0;
  }
  return q;
}

// Recounts a finished split: sizes as requested and every label's count in
// every part within one example of its proportional share.
inline void verify_split(const SplitResult& r, const std::vector<std::size_t>& counts,
                         const std::vector<int>& labels, const std::array<std::size_t, 3>& sizes,
                         std::size_t n) {
  const std::array<const Corpus*, 3> parts{&r.train, &r.val, &r.test};
  for (std::size_t k = 0; k < 3; ++k) {
    if (parts[k]->size() != sizes[k]) throw IntegrityError("split recount: part sizes differ");
    std::map<int, std::size_t> got;
    for (const auto& ex : *parts[k]) ++got[ex.label];
    for (std::size_t l = 0; l < labels.size(); ++l) {
      const std::size_t lo = counts[l] * sizes[k] / n;
      const std::size_t hi = lo + (counts[l] * sizes[k] % n != 0 ? 1 : 0);
      const std::size_t g = got[labels[l]];
      if (g < lo || g > hi) {
        throw IntegrityError("split recount: label " + std::to_string(labels[l]) +
                             " is off its share by more than one example");
      }
    }
  }
}

}  // namespace detail

// Seeded shuffle within each label stratum, then the stratum's val and test quotas
// are cut from its front. Every split keeps corpus order.
inline SplitResult split(const Corpus& corpus, const SplitSpec& spec) {
  if (corpus.empty()) throw InputError("cannot split an empty corpus");
  const std::size_t n = corpus.size();
  const auto sizes = split_sizes(n, spec.ratios);

  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < n; ++i) strata[corpus[i].label].push_back(i);
  std::vector<int> labels;
  std::vector<std::size_t> counts;
  for (const auto& [label, idx] : strata) {
    labels.push_back(label);
    counts.push_back(idx.size());
  }

  SplitResult result;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (counts[s] < 10) {
      result.warnings.push_back("label " + std::to_string(labels[s]) + " has only " +
                                std::to_string(counts[s]) + " examples; split is degenerate");
    }
  }
  const auto quota = detail::quota_table(counts, sizes, n);

  std::vector<int> assignment(n, 0);  // 0 train, 1 val, 2 test
  for (std::size_t s = 0; s < labels.size(); ++s) {
    auto idx = strata[labels[s]];
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(labels[s]))));
    for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
      std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
    }
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::size_t val = quota[s][1];
      assignment[idx[k]] = k < val ? 1 : (k < val + quota[s][2] ? 2 : 0);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    (assignment[i] == 0 ? result.train : assignment[i] == 1 ? result.val : result.test)
        .push_back(corpus[i]);
  }
  detail::verify_split(result, counts, labels, sizes, n);
  return result;
}

// ---------------------------------------------------------------------------
// Corpus-level attacks

struct LoggedRecord {
  std::string id;
  AttackRecord record;
};

struct AttackedCorpus {
  Corpus corpus;
  std::vector<LoggedRecord> log;
};

// Sentence i draws from the stream derive_seed(config.seed, i), so the
// result does not depend on processing order.
inline AttackedCorpus attack_corpus(const Corpus& corpus, const AttackConfig& config) {
  config.validate();
  AttackedCorpus out;
  out.corpus.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Rng rng(derive_seed(config.seed, i));
    auto res = apply_attacks(corpus[i].text, config, rng);
    out.corpus.push_back({corpus[i].id, std::move(res.text), corpus[i].label});
    for (auto& rec : res.log) out.log.push_back({corpus[i].id, std::move(rec)});
  }
  return out;
}

inline nlohmann::ordered_json to_json(const AttackRecord& r) {
  nlohmann::ordered_json j;
  j["word_index"] = r.word_index;
  j["attack"] = std::string(to_string(r.attack));
  j["char_index"] = r.char_index;
  j["payload"] = r.payload;
  j["before"] = r.before;
  j["after"] = r.after;
  return j;
}

inline AttackRecord attack_record_from_json(const nlohmann::json& j) {
  return AttackRecord{j.at("word_index").get<std::size_t>(),
                      parse_attack_type(j.at("attack").get<std::string>()),
                      j.at("char_index").get<std::size_t>(), j.at("payload").get<std::string>(),
                      j.at("before").get<std::string>(), j.at("after").get<std::string>()};
}

struct AttackLogFooter {
  std::uint64_t seed = 0;
  double rate = 0.0;
  std::size_t attacked_words = 0;
};

// Each line is an AttackRecord with the example id prepended; the last line
// is the footer {"seed", "rate", "attacked_words"}.
inline void write_attack_log(std::ostream& out, const std::vector<LoggedRecord>& log,
                             const AttackConfig& config) {
  for (const auto& l : log) {
    nlohmann::ordered_json j;
    j["id"] = l.id;
    const auto rec = to_json(l.record);
    for (const auto& [k, v] : rec.items()) j[k] = v;
    out << j.dump() << "\n";
  }
  nlohmann::ordered_json footer;
  footer["seed"] = config.seed;
  footer["rate"] = config.rate;
  footer["attacked_words"] = log.size();
  out << footer.dump() << "\n";
}

struct AttackLog {
  std::vector<LoggedRecord> records;
  AttackLogFooter footer;
};

inline AttackLog read_attack_log(std::istream& in) {
  AttackLog log;
  bool have_footer = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (have_footer) throw ParseError("record after footer", line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.contains("attacked_words")) {
        log.footer = {j.at("seed").get<std::uint64_t>(), j.at("rate").get<double>(),
                      j.at("attacked_words").get<std::size_t>()};
        have_footer = true;
      } else {
        log.records.push_back({j.at("id").get<std::string>(), attack_record_from_json(j)});
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed attack log: ") + e.what(), line_no);
    } catch (const InputError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!have_footer) throw ParseError("attack log has no footer", 0);
  if (log.footer.attacked_words != log.records.size()) {
    throw IntegrityError("attack log footer counts " + std::to_string(log.footer.attacked_words) +
                         " words but holds " + std::to_string(log.records.size()) + " records");
  }
  return log;
}

// Applies a log to the original corpus.
inline Corpus replay_corpus(const Corpus& original, const std::vector<LoggedRecord>& log) {
  std::map<std::string, std::vector<AttackRecord>> by_id;
  for (const auto& l : log) by_id[l.id].push_back(l.record);
  Corpus out = original;
  std::size_t used = 0;
  for (auto& ex : out) {
    auto it = by_id.find(ex.id);
    if (it == by_id.end()) continue;
    ex.text = replay_attacks(ex.text, it->second);
    ++used;
  }
  if (used != by_id.size()) throw IntegrityError("attack log names ids missing from the corpus");
  return out;
}

}  // namespace krobust

#endif  // KROBUST_CORPUS_HPP_
