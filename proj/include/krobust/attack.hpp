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

// The eight user-intended character-level attacks on Korean text and the
// per-sentence scheduler that applies them at a given word rate.

#ifndef KROBUST_ATTACK_HPP_
#define KROBUST_ATTACK_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "krobust/error.hpp"
#include "krobust/jamo.hpp"
#include "krobust/random.hpp"
#include "krobust/utf8.hpp"

namespace krobust {

enum class AttackType {
  InsertZz,
  InsertSpace,
  InsertSpecial,
  CopyInitial,
  CopyMiddle,
  CopyFinal,
  DecomposeFinal,
  DecomposeAll,
};

enum class AttackFamily { Insert, Copy, Decompose };

inline constexpr std::array<AttackType, 8> kAllAttacks = {
    AttackType::InsertZz,    AttackType::InsertSpace,    AttackType::InsertSpecial,
    AttackType::CopyInitial, AttackType::CopyMiddle,     AttackType::CopyFinal,
    AttackType::DecomposeFinal, AttackType::DecomposeAll};

constexpr AttackFamily family_of(AttackType t) noexcept {
  switch (t) {
    case AttackType::InsertZz:
    case AttackType::InsertSpace:
    case AttackType::InsertSpecial:
      return AttackFamily::Insert;
    case AttackType::CopyInitial:
    case AttackType::CopyMiddle:
    case AttackType::CopyFinal:
      return AttackFamily::Copy;
    case AttackType::DecomposeFinal:
    case AttackType::DecomposeAll:
      return AttackFamily::Decompose;
  }
  return AttackFamily::Insert;
}

inline std::string_view to_string(AttackType t) noexcept {
  switch (t) {
    case AttackType::InsertZz: return "InsertZz";
    case AttackType::InsertSpace: return "InsertSpace";
    case AttackType::InsertSpecial: return "InsertSpecial";
    case AttackType::CopyInitial: return "CopyInitial";
    case AttackType::CopyMiddle: return "CopyMiddle";
    case AttackType::CopyFinal: return "CopyFinal";
    case AttackType::DecomposeFinal: return "DecomposeFinal";
    case AttackType::DecomposeAll: return "DecomposeAll";
  }
  return "?";
}

inline std::string_view to_string(AttackFamily f) noexcept {
  switch (f) {
    case AttackFamily::Insert: return "Insert";
    case AttackFamily::Copy: return "Copy";
    case AttackFamily::Decompose: return "Decompose";
  }
  return "?";
}

namespace detail {

inline std::string lowered_alnum(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '_' || c == '-') continue;
    out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
  }
  return out;
}

}  // namespace detail

// Accepts "InsertZz", "insert_zz", "insert-zz" and so on.
inline AttackType parse_attack_type(std::string_view name) {
  const std::string key = detail::lowered_alnum(name);
  for (AttackType t : kAllAttacks) {
    if (detail::lowered_alnum(to_string(t)) == key) return t;
  }
  throw InputError("unknown attack type: " + std::string(name));
}

// "all", a family name, or a comma list mixing families and type names.
// Result is deduplicated and in canonical order.
inline std::vector<AttackType> parse_attack_selection(std::string_view spec) {
  std::array<bool, kAllAttacks.size()> on{};
  std::size_t start = 0;
  bool any = false;
  while (start <= spec.size()) {
    std::size_t end = spec.find(',', start);
    if (end == std::string_view::npos) end = spec.size();
    const std::string key = detail::lowered_alnum(spec.substr(start, end - start));
    start = end + 1;
    if (key.empty()) continue;
    any = true;
    bool matched = false;
    for (std::size_t i = 0; i < kAllAttacks.size(); ++i) {
      const AttackType t = kAllAttacks[i];
      if (key == "all" || key == detail::lowered_alnum(to_string(family_of(t))) ||
          key == detail::lowered_alnum(to_string(t))) {
        on[i] = true;
        matched = true;
      }
    }
    if (!matched) throw InputError("unknown attack selection: " + key);
  }
  if (!any) throw InputError("empty attack selection");
  std::vector<AttackType> out;
  for (std::size_t i = 0; i < kAllAttacks.size(); ++i) {
    if (on[i]) out.push_back(kAllAttacks[i]);
  }
  return out;
}

enum class CopyFinalSemantics {
  Move,      // source loses its final (liaison)
  CopyKeep,  // source keeps its final
};

struct AttackConfig {
  double rate = 0.0;
  std::uint64_t seed = 0;
  std::vector<AttackType> enabled{kAllAttacks.begin(), kAllAttacks.end()};
  int zz_min = 2;
  int zz_max = 5;
  std::u32string special_charset = U"~!@12";
  CopyFinalSemantics copy_final = CopyFinalSemantics::Move;

  void validate() const {
    if (!(rate >= 0.0 && rate <= 1.0)) throw InputError("attack rate must lie in [0, 1]");
    if (zz_min < 1 || zz_max < zz_min) throw InputError("zz count range must be nonempty with min >= 1");
    if (enabled.empty()) throw InputError("no attack enabled");
    if (special_charset.empty()) throw InputError("special charset is empty");
  }
};

struct AttackRecord {
  std::size_t word_index = 0;
  AttackType attack = AttackType::InsertZz;
  std::size_t char_index = 0;
  std::string payload;
  std::string before;
  std::string after;

  friend bool operator==(const AttackRecord&, const AttackRecord&) = default;
};

enum class InsertVariant { Zz, Space, Special };
enum class CopyVariant { Initial, Middle, Final };
enum class DecomposeVariant { Final, All };

// Parameters an insertion needs besides its position.
struct InsertPayload {
  int zz_count = 2;
  bool occupy_final = true;
  char32_t special = U'@';
};

// An applied edit: the new word and the material it introduced.
struct WordEdit {
  std::u32string word;
  std::u32string payload;
};

namespace detail {

inline constexpr char32_t kZz = U'ㅋ';
inline constexpr int kZzFinal = 24;

inline void check_position(std::u32string_view word, std::size_t index) {
  if (index >= word.size()) {
    throw PositionError("character index " + std::to_string(index) +
                        " outside word of length " + std::to_string(word.size()));
  }
}

}  // namespace detail

// Inserts material after word[char_index]. Space insertion is only legal
// strictly inside the word.
inline std::optional<WordEdit> insert_edit(std::u32string_view word, InsertVariant variant,
                                           std::size_t char_index,
                                           const InsertPayload& payload = {}) {
  detail::check_position(word, char_index);
  std::u32string out(word);
  const auto at = static_cast<std::ptrdiff_t>(char_index + 1);
  switch (variant) {
    case InsertVariant::Zz: {
      if (payload.zz_count < 1) throw InputError("zz count must be at least 1");
      std::u32string material(static_cast<std::size_t>(payload.zz_count), detail::kZz);
      int standalone = payload.zz_count;
      if (payload.occupy_final) {
        auto d = jamo::decompose(out[char_index]);
        if (d && !d->has_final()) {
          d->final_index = detail::kZzFinal;
          out[char_index] = jamo::compose(*d);
          --standalone;
        }
      }
      out.insert(out.begin() + at, static_cast<std::size_t>(standalone), detail::kZz);
      return WordEdit{std::move(out), std::move(material)};
    }
    case InsertVariant::Space:
      if (char_index + 1 >= word.size()) return std::nullopt;
      out.insert(out.begin() + at, U' ');
      return WordEdit{std::move(out), U" "};
    case InsertVariant::Special:
      out.insert(out.begin() + at, payload.special);
      return WordEdit{std::move(out), std::u32string(1, payload.special)};
  }
  return std::nullopt;
}

inline std::optional<WordEdit> copy_edit(
    std::u32string_view word, CopyVariant variant, std::size_t source_index,
    CopyFinalSemantics semantics = CopyFinalSemantics::Move) {
  detail::check_position(word, source_index);
  auto src = jamo::decompose(word[source_index]);
  if (!src) return std::nullopt;
  std::u32string out(word);
  switch (variant) {
    case CopyVariant::Initial: {
      if (source_index == 0) return std::nullopt;
      auto prev = jamo::decompose(word[source_index - 1]);
      if (!prev || prev->has_final()) return std::nullopt;
      const auto f = jamo::initial_to_final(src->initial_index);
      if (!f) return std::nullopt;
      prev->final_index = *f;
      out[source_index - 1] = jamo::compose(*prev);
      return WordEdit{std::move(out),
                      std::u32string(1, jamo::initial_to_compat_jamo(src->initial_index))};
    }
    case CopyVariant::Middle: {
      const jamo::SyllableDecomposition added{jamo::kNullInitial, src->medial_index,
                                              src->final_index};
      jamo::SyllableDecomposition kept = *src;
      kept.final_index = 0;
      out[source_index] = jamo::compose(kept);
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(source_index + 1),
                 jamo::compose(added));
      return WordEdit{std::move(out),
                      std::u32string(1, jamo::medial_to_compat_jamo(src->medial_index))};
    }
    case CopyVariant::Final: {
      if (!src->has_final() || source_index + 1 >= word.size()) return std::nullopt;
      auto next = jamo::decompose(word[source_index + 1]);
      if (!next || next->initial_index != jamo::kNullInitial) return std::nullopt;
      const auto i = jamo::final_to_initial(src->final_index);
      // ㅇ does not carry over onto a null onset.
      if (!i || *i == jamo::kNullInitial) return std::nullopt;
      next->initial_index = *i;
      out[source_index + 1] = jamo::compose(*next);
      const char32_t moved = jamo::final_to_compat_jamo(src->final_index);
      if (semantics == CopyFinalSemantics::Move) {
        src->final_index = 0;
        out[source_index] = jamo::compose(*src);
      }
      return WordEdit{std::move(out), std::u32string(1, moved)};
    }
  }
  return std::nullopt;
}

inline std::optional<WordEdit> decompose_edit(std::u32string_view word,
                                              DecomposeVariant variant,
                                              std::size_t source_index) {
  detail::check_position(word, source_index);
  auto src = jamo::decompose(word[source_index]);
  if (!src) return std::nullopt;
  std::u32string out(word.substr(0, source_index));
  std::u32string material;
  switch (variant) {
    case DecomposeVariant::Final: {
      if (!src->has_final()) return std::nullopt;
      material.push_back(jamo::final_to_compat_jamo(src->final_index));
      jamo::SyllableDecomposition open = *src;
      open.final_index = 0;
      out.push_back(jamo::compose(open));
      break;
    }
    case DecomposeVariant::All:
      material.push_back(jamo::initial_to_compat_jamo(src->initial_index));
      material.push_back(jamo::medial_to_compat_jamo(src->medial_index));
      if (src->has_final()) material.push_back(jamo::final_to_compat_jamo(src->final_index));
      break;
  }
  out += material;
  out += word.substr(source_index + 1);
  return WordEdit{std::move(out), std::move(material)};
}

// UTF-8 conveniences returning only the perturbed word.
inline std::optional<std::string> apply_insert(std::string_view word, InsertVariant variant,
                                               std::size_t char_index,
                                               const InsertPayload& payload = {}) {
  auto e = insert_edit(utf8::decode(word), variant, char_index, payload);
  if (!e) return std::nullopt;
  return utf8::encode(e->word);
}

inline std::optional<std::string> apply_copy(
    std::string_view word, CopyVariant variant, std::size_t source_index,
    CopyFinalSemantics semantics = CopyFinalSemantics::Move) {
  auto e = copy_edit(utf8::decode(word), variant, source_index, semantics);
  if (!e) return std::nullopt;
  return utf8::encode(e->word);
}

inline std::optional<std::string> apply_decompose(std::string_view word,
                                                  DecomposeVariant variant,
                                                  std::size_t source_index) {
  auto e = decompose_edit(utf8::decode(word), variant, source_index);
  if (!e) return std::nullopt;
  return utf8::encode(e->word);
}

// Edit for one attack type at one position with fully pinned parameters.
inline std::optional<WordEdit> attack_edit(std::u32string_view word, AttackType type,
                                           std::size_t char_index,
                                           const InsertPayload& payload,
                                           CopyFinalSemantics semantics) {
  switch (type) {
    case AttackType::InsertZz:
      return insert_edit(word, InsertVariant::Zz, char_index, payload);
    case AttackType::InsertSpace:
      return insert_edit(word, InsertVariant::Space, char_index, payload);
    case AttackType::InsertSpecial:
      return insert_edit(word, InsertVariant::Special, char_index, payload);
    case AttackType::CopyInitial:
      return copy_edit(word, CopyVariant::Initial, char_index, semantics);
    case AttackType::CopyMiddle:
      return copy_edit(word, CopyVariant::Middle, char_index, semantics);
    case AttackType::CopyFinal:
      return copy_edit(word, CopyVariant::Final, char_index, semantics);
    case AttackType::DecomposeFinal:
      return decompose_edit(word, DecomposeVariant::Final, char_index);
    case AttackType::DecomposeAll:
      return decompose_edit(word, DecomposeVariant::All, char_index);
  }
  return std::nullopt;
}

// Positions at which `type` applies to `word`. Insertions apply for every
// parameter choice, so a single probe payload decides applicability.
inline std::vector<std::size_t> applicable_positions(std::u32string_view word,
                                                     AttackType type,
                                                     CopyFinalSemantics semantics) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (attack_edit(word, type, i, InsertPayload{}, semantics)) out.push_back(i);
  }
  return out;
}

// round_half_up(rate * word_count), clamped to word_count. The epsilon keeps
// products such as 0.3 * 5 on the half-way point.
inline std::size_t target_count(std::size_t word_count, double rate) {
  const double k = std::floor(rate * static_cast<double>(word_count) + 0.5 + 1e-9);
  if (k <= 0.0) return 0;
  return std::min(word_count, static_cast<std::size_t>(k));
}

namespace detail {

// Uniform random permutation of [0, n) by Fisher-Yates.
inline std::vector<std::size_t> draw_order(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(order[i], order[j]);
  }
  return order;
}

inline bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

struct Segment {
  std::string text;
  bool is_word;
};

inline std::vector<Segment> segment(std::string_view s) {
  std::vector<Segment> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const bool word = !is_space(s[i]);
    std::size_t j = i;
    while (j < s.size() && is_space(s[j]) != word) ++j;
    out.push_back({std::string(s.substr(i, j - i)), word});
    i = j;
  }
  return out;
}

}  // namespace detail

// Splits on ASCII whitespace.
inline std::vector<std::string> split_words(std::string_view sentence) {
  std::vector<std::string> out;
  for (auto& seg : detail::segment(sentence)) {
    if (seg.is_word) out.push_back(std::move(seg.text));
  }
  return out;
}

// k = target_count(word_count, rate) distinct indices, uniform without
// replacement, returned sorted.
inline std::vector<std::size_t> select_targets(std::size_t word_count, double rate, Rng& rng) {
  auto order = detail::draw_order(word_count, rng);
  order.resize(target_count(word_count, rate));
  std::sort(order.begin(), order.end());
  return order;
}

struct AttackResult {
  std::string text;
  std::vector<AttackRecord> log;  // sorted by word_index
};

// Tries the enabled attacks on one word in random order until one applies.
inline std::optional<AttackRecord> attack_word(std::string_view word, std::size_t word_index,
                                               const AttackConfig& config, Rng& rng) {
  const std::u32string cps = utf8::decode(word);
  std::vector<AttackType> remaining = config.enabled;
  while (!remaining.empty()) {
    const auto pick = static_cast<std::size_t>(rng.below(remaining.size()));
    const AttackType type = remaining[pick];
    const auto positions = applicable_positions(cps, type, config.copy_final);
    if (positions.empty()) {
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
      continue;
    }
    const std::size_t pos = positions[rng.below(positions.size())];
    InsertPayload payload;
    if (type == AttackType::InsertZz) {
      payload.zz_count = static_cast<int>(rng.between(config.zz_min, config.zz_max));
    } else if (type == AttackType::InsertSpecial) {
      payload.special = config.special_charset[rng.below(config.special_charset.size())];
    }
    auto edit = attack_edit(cps, type, pos, payload, config.copy_final);
    return AttackRecord{word_index, type, pos, utf8::encode(edit->payload),
                        std::string(word), utf8::encode(edit->word)};
  }
  return std::nullopt;
}

// Attacks round_half_up(rate * W) words of the sentence. Targets are visited
// in a random order; a word no enabled attack applies to is replaced by the
// next unvisited word. Whitespace and non-target words are copied verbatim.
inline AttackResult apply_attacks(std::string_view sentence, const AttackConfig& config,
                                  Rng& rng) {
  config.validate();
  auto segments = detail::segment(sentence);
  std::vector<std::size_t> word_segments;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].is_word) word_segments.push_back(i);
  }
  const std::size_t wanted = target_count(word_segments.size(), config.rate);
  AttackResult result;
  if (wanted > 0) {
    for (std::size_t w : detail::draw_order(word_segments.size(), rng)) {
      if (result.log.size() == wanted) break;
      auto& seg = segments[word_segments[w]];
      if (auto rec = attack_word(seg.text, w, config, rng)) {
        seg.text = rec->after;
        result.log.push_back(std::move(*rec));
      }
    }
    std::sort(result.log.begin(), result.log.end(),
              [](const AttackRecord& a, const AttackRecord& b) {
                return a.word_index < b.word_index;
              });
  }
  for (const auto& seg : segments) result.text += seg.text;
  return result;
}

// Rebuilds an attacked sentence from the original and its log.
inline std::string replay_attacks(std::string_view sentence,
                                  const std::vector<AttackRecord>& log) {
  auto segments = detail::segment(sentence);
  std::vector<std::size_t> word_segments;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].is_word) word_segments.push_back(i);
  }
  for (const auto& rec : log) {
    if (rec.word_index >= word_segments.size()) {
      throw IntegrityError("attack record addresses word " + std::to_string(rec.word_index) +
                           " of a " + std::to_string(word_segments.size()) + "-word sentence");
    }
    auto& seg = segments[word_segments[rec.word_index]];
    if (seg.text != rec.before) {
      throw IntegrityError("attack record does not match word " +
                           std::to_string(rec.word_index) + ": '" + rec.before + "' vs '" +
                           seg.text + "'");
    }
    seg.text = rec.after;
  }
  std::string out;
  for (const auto& seg : segments) out += seg.text;
  return out;
}

}  // namespace krobust

#endif  // KROBUST_ATTACK_HPP_
