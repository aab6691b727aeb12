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

// Attacks one sentence with each attack type in turn and prints the log.
//
//   attack_sentence "쓰레기 같은 소리" [seed]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "krobust/attack.hpp"

int main(int argc, char** argv) {
  const std::string sentence = argc > 1 ? argv[1] : "쓰레기 같은 소리 좀 그만해";
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 0;

  for (krobust::AttackType type : krobust::kAllAttacks) {
    krobust::AttackConfig cfg;
    cfg.rate = 0.6;
    cfg.seed = seed;
    cfg.enabled = {type};
    krobust::Rng rng(krobust::derive_seed(seed, 0));
    const auto result = krobust::apply_attacks(sentence, cfg, rng);
    std::printf("%-16s %s\n", std::string(krobust::to_string(type)).c_str(), result.text.c_str());
    for (const auto& r : result.log) {
      std::printf("%16s word %zu char %zu: %s -> %s\n", "", r.word_index, r.char_index,
                  r.before.c_str(), r.after.c_str());
    }
  }
  return 0;
}
