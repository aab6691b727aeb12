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

// Arithmetic Hangul syllable decomposition over the precomposed block
// U+AC00..U+D7A3 and the consonant role tables used by the Copy attacks.
//
// A syllable is initial * 588 + medial * 28 + final past U+AC00, with 19
// initials, 21 medials and 28 finals (final 0 is the empty slot). Standalone
// letters are emitted from the Compatibility Jamo block U+3131..U+3163.

#ifndef KROBUST_JAMO_HPP_
#define KROBUST_JAMO_HPP_

#include <array>
#include <optional>
#include <string>

#include "krobust/error.hpp"

namespace krobust::jamo {

inline constexpr char32_t kSyllableBase = 0xAC00;
inline constexpr char32_t kSyllableLast = 0xD7A3;
inline constexpr int kInitialCount = 19;
inline constexpr int kMedialCount = 21;
inline constexpr int kFinalCount = 28;
inline constexpr int kSyllableCount = kInitialCount * kMedialCount * kFinalCount;

// Initial index of the silent consonant ㅇ, the null onset.
inline constexpr int kNullInitial = 11;

struct SyllableDecomposition {
  int initial_index = 0;  // [0, 18]
  int medial_index = 0;   // [0, 20]
  int final_index = 0;    // [0, 27], 0 = no final sound

  bool has_final() const noexcept { return final_index != 0; }
  friend bool operator==(const SyllableDecomposition&,
                         const SyllableDecomposition&) = default;
};

inline constexpr std::array<char32_t, kInitialCount> kInitialToCompat = {
    U'ㄱ', U'ㄲ', U'ㄴ', U'ㄷ', U'ㄸ', U'ㄹ', U'ㅁ', U'ㅂ', U'ㅃ', U'ㅅ',
    U'ㅆ', U'ㅇ', U'ㅈ', U'ㅉ', U'ㅊ', U'ㅋ', U'ㅌ', U'ㅍ', U'ㅎ'};

// Index 0 has no glyph.
inline constexpr std::array<char32_t, kFinalCount> kFinalToCompat = {
    0,     U'ㄱ', U'ㄲ', U'ㄳ', U'ㄴ', U'ㄵ', U'ㄶ', U'ㄷ', U'ㄹ', U'ㄺ',
    U'ㄻ', U'ㄼ', U'ㄽ', U'ㄾ', U'ㄿ', U'ㅀ', U'ㅁ', U'ㅂ', U'ㅄ', U'ㅅ',
    U'ㅆ', U'ㅇ', U'ㅈ', U'ㅊ', U'ㅋ', U'ㅌ', U'ㅍ', U'ㅎ'};

// Vowels are contiguous and in medial order in the compatibility block.
inline constexpr char32_t kCompatMedialBase = 0x314F;

namespace detail {

constexpr std::array<int, kInitialCount> build_initial_to_final() {
  std::array<int, kInitialCount> out{};
  for (int i = 0; i < kInitialCount; ++i) {
    out[i] = -1;
    for (int f = 1; f < kFinalCount; ++f) {
      if (kFinalToCompat[f] == kInitialToCompat[i]) out[i] = f;
    }
  }
  return out;
}

constexpr std::array<int, kFinalCount> build_final_to_initial() {
  std::array<int, kFinalCount> out{};
  for (int f = 0; f < kFinalCount; ++f) {
    out[f] = -1;
    for (int i = 0; i < kInitialCount; ++i) {
      if (f != 0 && kInitialToCompat[i] == kFinalToCompat[f]) out[f] = i;
    }
  }
  return out;
}

// -1 marks a consonant that cannot occupy the other role.
inline constexpr auto kInitialToFinal = build_initial_to_final();
inline constexpr auto kFinalToInitial = build_final_to_initial();

}  // namespace detail

constexpr bool is_syllable(char32_t c) noexcept {
  return c >= kSyllableBase && c <= kSyllableLast;
}

constexpr std::optional<SyllableDecomposition> decompose(char32_t c) noexcept {
  if (!is_syllable(c)) return std::nullopt;
  const int offset = static_cast<int>(c - kSyllableBase);
  return SyllableDecomposition{offset / (kMedialCount * kFinalCount),
                               (offset / kFinalCount) % kMedialCount,
                               offset % kFinalCount};
}

constexpr bool in_range(const SyllableDecomposition& d) noexcept {
  return d.initial_index >= 0 && d.initial_index < kInitialCount &&
         d.medial_index >= 0 && d.medial_index < kMedialCount &&
         d.final_index >= 0 && d.final_index < kFinalCount;
}

inline char32_t compose(const SyllableDecomposition& d) {
  if (!in_range(d)) {
    throw InvalidDecomposition("jamo indices out of range: (" +
                               std::to_string(d.initial_index) + ", " +
                               std::to_string(d.medial_index) + ", " +
                               std::to_string(d.final_index) + ")");
  }
  return kSyllableBase + static_cast<char32_t>(
                             (d.initial_index * kMedialCount + d.medial_index) *
                                 kFinalCount +
                             d.final_index);
}

inline char32_t initial_to_compat_jamo(int initial_index) {
  if (initial_index < 0 || initial_index >= kInitialCount) {
    throw InvalidDecomposition("initial index out of range: " +
                               std::to_string(initial_index));
  }
  return kInitialToCompat[initial_index];
}

inline char32_t medial_to_compat_jamo(int medial_index) {
  if (medial_index < 0 || medial_index >= kMedialCount) {
    throw InvalidDecomposition("medial index out of range: " +
                               std::to_string(medial_index));
  }
  return kCompatMedialBase + static_cast<char32_t>(medial_index);
}

inline char32_t final_to_compat_jamo(int final_index) {
  if (final_index == 0) throw NoFinalError("the empty final has no standalone form");
  if (final_index < 0 || final_index >= kFinalCount) {
    throw InvalidDecomposition("final index out of range: " +
                               std::to_string(final_index));
  }
  return kFinalToCompat[final_index];
}

// Same consonant in the final slot; absent for ㄸ, ㅃ, ㅉ.
constexpr std::optional<int> initial_to_final(int initial_index) noexcept {
  if (initial_index < 0 || initial_index >= kInitialCount) return std::nullopt;
  const int f = detail::kInitialToFinal[initial_index];
  if (f < 0) return std::nullopt;
  return f;
}

// Same consonant in the initial slot; absent for the empty final and clusters.
constexpr std::optional<int> final_to_initial(int final_index) noexcept {
  if (final_index < 0 || final_index >= kFinalCount) return std::nullopt;
  const int i = detail::kFinalToInitial[final_index];
  if (i < 0) return std::nullopt;
  return i;
}

static_assert(decompose(U'같') == SyllableDecomposition{0, 0, 25});
static_assert(initial_to_final(5) == 8);
static_assert(final_to_initial(25) == 16);
static_assert(!initial_to_final(4).has_value());

}  // namespace krobust::jamo

#endif  // KROBUST_JAMO_HPP_
