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
#include <memory>
#include <vector>

#include "dflow/core/types.h"
#include "dflow/duplex/predictor.h"
#include "dflow/stagebus/wire.h"

namespace dflow::stagebus {

struct TextBatchContent {
  std::vector<std::uint32_t> tokens;
  std::vector<SemanticVector> semantics;
};

/// Content source for the simulated stages. Timing never comes from here; the
/// engine charges StageDescriptor latencies on the virtual clock, which is why
/// built-in and external stages yield the same trace.
class StageBackend {
 public:
  virtual ~StageBackend() = default;
  virtual TextBatchContent text_batch(std::uint32_t turn, std::uint32_t batch,
                                      std::uint64_t first_index, std::uint32_t count) = 0;
  virtual std::vector<SpeechToken> speech_batch(std::uint32_t turn, std::uint32_t batch,
                                                std::uint64_t first_index,
                                                std::uint32_t count, bool final) = 0;
  virtual void synthesize(std::uint32_t turn, std::uint32_t batch, std::uint64_t first_index,
                          const std::vector<SpeechToken>& tokens, bool final) = 0;
  virtual void marker(std::uint32_t turn, ControlMarker marker) = 0;
  virtual duplex::DuplexDecision predict(const duplex::PredictorContext& ctx) = 0;
};

/// The deterministic mocks in-process: pinned-hash content and the configured
/// predictor.
class BuiltinBackend final : public StageBackend {
 public:
  BuiltinBackend(std::string session, const ConfigurePayload& config);

  TextBatchContent text_batch(std::uint32_t turn, std::uint32_t batch,
                              std::uint64_t first_index, std::uint32_t count) override;
  std::vector<SpeechToken> speech_batch(std::uint32_t turn, std::uint32_t batch,
                                        std::uint64_t first_index, std::uint32_t count,
                                        bool final) override;
  void synthesize(std::uint32_t, std::uint32_t, std::uint64_t,
                  const std::vector<SpeechToken>&, bool) override {}
  void marker(std::uint32_t, ControlMarker) override {}
  duplex::DuplexDecision predict(const duplex::PredictorContext& ctx) override;

 private:
  std::string session_;
  ConfigurePayload config_;
  std::unique_ptr<duplex::Predictor> predictor_;
};

/// Sends each call to the backend serving its role. The voice encoder carries
/// no wire traffic; markers go to the voice token LM.
class RoutedBackend final : public StageBackend {
 public:
  RoutedBackend(StageBackend* text_llm, StageBackend* voice_token_lm, StageBackend* token2wav,
                StageBackend* predictor)
      : llm_(text_llm), lm_(voice_token_lm), wav_(token2wav), pred_(predictor) {}

  TextBatchContent text_batch(std::uint32_t turn, std::uint32_t batch,
                              std::uint64_t first_index, std::uint32_t count) override {
    return llm_->text_batch(turn, batch, first_index, count);
  }
  std::vector<SpeechToken> speech_batch(std::uint32_t turn, std::uint32_t batch,
                                        std::uint64_t first_index, std::uint32_t count,
                                        bool final) override {
    return lm_->speech_batch(turn, batch, first_index, count, final);
  }
  void synthesize(std::uint32_t turn, std::uint32_t batch, std::uint64_t first_index,
                  const std::vector<SpeechToken>& tokens, bool final) override {
    wav_->synthesize(turn, batch, first_index, tokens, final);
  }
  void marker(std::uint32_t turn, ControlMarker m) override { lm_->marker(turn, m); }
  duplex::DuplexDecision predict(const duplex::PredictorContext& ctx) override {
    return pred_->predict(ctx);
  }

 private:
  StageBackend* llm_;
  StageBackend* lm_;
  StageBackend* wav_;
  StageBackend* pred_;
};

}  // namespace dflow::stagebus
