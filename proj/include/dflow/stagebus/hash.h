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

#pragma once

#include <cstdint>
#include <string_view>

namespace dflow::stagebus {

/// The pinned 64-bit hash shared by the built-in mocks and any external stage
/// that wants bit-identical traces. Byte layout fed to FNV-1a 64:
///
///   tag bytes, 0x00, seed (u64 LE), session bytes, 0x00, turn (u64 LE),
///   index (u64 LE)
///
/// followed by the SplitMix64 finalizer. Constants are listed in
/// docs/protocol.md.
std::uint64_t pinned_hash(std::string_view tag, std::uint64_t seed,
                          std::string_view session, std::uint64_t turn,
                          std::uint64_t index);

/// Maps a hash to [0, 1) using its top 53 bits.
double hash_to_unit(std::uint64_t h);

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x00000100000001b3ULL;

std::uint64_t splitmix64_finalize(std::uint64_t x);

}  // namespace dflow::stagebus
