/* Copyright 2026 The duplexflow Authors. All Rights Reserved.

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

#include "dflow/stagebus/hash.h"

namespace dflow::stagebus {

namespace {

struct Fnv1a {
  std::uint64_t state = kFnvOffset;

  void byte(std::uint8_t b) {
    state ^= b;
    state *= kFnvPrime;
  }
  void bytes(std::string_view s) {
    for (char c : s) byte(static_cast<std::uint8_t>(c));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

}  // namespace

std::uint64_t splitmix64_finalize(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t pinned_hash(std::string_view tag, std::uint64_t seed,
                          std::string_view session, std::uint64_t turn,
                          std::uint64_t index) {
  Fnv1a h;
  h.bytes(tag);
  h.byte(0);
  h.u64(seed);
  h.bytes(session);
  h.byte(0);
  h.u64(turn);
  h.u64(index);
  return splitmix64_finalize(h.state);
}

double hash_to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace dflow::stagebus
