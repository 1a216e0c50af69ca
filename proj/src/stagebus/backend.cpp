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

#include "dflow/stagebus/backend.h"

#include "dflow/stagebus/mock_stages.h"

namespace dflow::stagebus {

BuiltinBackend::BuiltinBackend(std::string session, const ConfigurePayload& config)
    : session_(std::move(session)),
      config_(config),
      predictor_(duplex::make_predictor(config.predictor)) {}

TextBatchContent BuiltinBackend::text_batch(std::uint32_t turn, std::uint32_t,
                                            std::uint64_t first_index, std::uint32_t count) {
  return {mock_text_tokens(session_, turn, first_index, count, config_.text_vocab, config_.seed),
          mock_semantic_vectors(session_, turn, first_index, count, config_.hidden_width,
                                config_.seed)};
}

std::vector<SpeechToken> BuiltinBackend::speech_batch(std::uint32_t turn, std::uint32_t,
                                                      std::uint64_t first_index,
                                                      std::uint32_t count, bool) {
  return mock_speech_tokens(session_, turn, first_index, count, config_.codebook_size,
                            config_.seed);
}

duplex::DuplexDecision BuiltinBackend::predict(const duplex::PredictorContext& ctx) {
  return predictor_->decide(ctx);
}

}  // namespace dflow::stagebus
