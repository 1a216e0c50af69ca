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

#include "dflow/stagebus/mock_stages.h"

#include <string>

#include "dflow/core/error.h"
#include "dflow/stagebus/hash.h"

namespace dflow::stagebus {

std::vector<SpeechToken> mock_speech_tokens(std::string_view session, std::uint64_t turn,
                                            std::uint64_t first_index, std::uint32_t count,
                                            std::uint32_t codebook_size, std::uint64_t seed) {
  if (codebook_size < 2) throw ValidationError("codebook size must be >= 2");
  std::vector<SpeechToken> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto h = pinned_hash("speech", seed, session, turn, first_index + i);
    out.push_back(SpeechToken{static_cast<std::uint32_t>(h % codebook_size)});
  }
  return out;
}

std::vector<std::uint32_t> mock_text_tokens(std::string_view session, std::uint64_t turn,
                                            std::uint64_t first_index, std::uint32_t count,
                                            std::uint32_t text_vocab, std::uint64_t seed) {
  if (text_vocab < 1) throw ValidationError("text vocabulary must be non-empty");
  std::vector<std::uint32_t> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    out.push_back(static_cast<std::uint32_t>(
        pinned_hash("text", seed, session, turn, first_index + i) % text_vocab));
  }
  return out;
}

std::vector<SemanticVector> mock_semantic_vectors(std::string_view session,
                                                  std::uint64_t turn,
                                                  std::uint64_t first_index,
                                                  std::uint32_t count,
                                                  std::uint32_t hidden_width,
                                                  std::uint64_t seed) {
  if (hidden_width < 1) throw ValidationError("hidden width must be >= 1");
  const std::uint64_t width = 2ULL * hidden_width;
  std::vector<SemanticVector> out(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    auto& v = out[i].values;
    v.resize(width);
    for (std::uint64_t c = 0; c < width; ++c) {
      const auto h = pinned_hash("semantic", seed, session, turn,
                                 (first_index + i) * width + c);
      v[c] = 2.0 * hash_to_unit(h) - 1.0;
    }
  }
  return out;
}

}  // namespace dflow::stagebus
