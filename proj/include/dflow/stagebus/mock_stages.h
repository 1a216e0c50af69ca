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
#include <vector>

#include "dflow/core/types.h"

namespace dflow::stagebus {

/// Deterministic stand-ins for the neural stages. Every output is a function
/// of (seed, session, turn, index) through pinned_hash, so an external stage
/// implementing the same hash reproduces them exactly.

/// Token i = pinned_hash("speech", seed, session, turn, first_index + i) mod V.
std::vector<SpeechToken> mock_speech_tokens(std::string_view session, std::uint64_t turn,
                                            std::uint64_t first_index, std::uint32_t count,
                                            std::uint32_t codebook_size, std::uint64_t seed);

inline std::vector<SpeechToken> mock_speech_tokens(std::string_view session,
                                                   std::uint64_t turn, std::uint32_t count,
                                                   std::uint32_t codebook_size,
                                                   std::uint64_t seed) {
  return mock_speech_tokens(session, turn, 0, count, codebook_size, seed);
}

/// Text token ids, tag "text", modulo text_vocab.
std::vector<std::uint32_t> mock_text_tokens(std::string_view session, std::uint64_t turn,
                                            std::uint64_t first_index, std::uint32_t count,
                                            std::uint32_t text_vocab, std::uint64_t seed);

/// Semantic vector for text token index j: component c is
/// 2 * unit(pinned_hash("semantic", seed, session, turn, j * 2D + c)) - 1.
std::vector<SemanticVector> mock_semantic_vectors(std::string_view session,
                                                  std::uint64_t turn,
                                                  std::uint64_t first_index,
                                                  std::uint32_t count,
                                                  std::uint32_t hidden_width,
                                                  std::uint64_t seed);

}  // namespace dflow::stagebus
