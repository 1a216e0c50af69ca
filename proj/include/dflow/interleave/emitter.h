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
#include <deque>
#include <variant>
#include <vector>

#include "dflow/core/types.h"

namespace dflow::interleave {

enum class EmitterPhase { Mixing, SpeechOnly, Done };

/// What the emitter can make progress on next.
enum class EmitterDemand { Semantics, Speech, None };

/// Incremental form of build_interleaved_sequence. Semantic vectors are held
/// until a full group (or the text end) is available; speech tokens of an open
/// group are held until the group reaches n_speech tokens.
struct EmitterState {
  RatioPolicy policy;
  std::deque<SemanticVector> pending_semantics;
  std::vector<SpeechToken> pending_speech;
  bool text_complete = false;
  bool speech_complete = false;
  bool group_open = false;
  bool emitted_any_group = false;
  std::uint32_t speech_emitted_in_group = 0;
  EmitterPhase phase = EmitterPhase::Mixing;
};

EmitterState make_emitter(const RatioPolicy& policy);

struct SemanticBatch {
  std::vector<SemanticVector> vectors;
};
struct TextDone {};
struct SpeechInput {
  SpeechToken token;
  bool final = false;  // last speech token of the turn
};

using EmitterInput = std::variant<SemanticBatch, TextDone, SpeechInput>;

struct EmitterStep {
  std::vector<InterleavedElement> emissions;
  EmitterState state;
};

/// Throws ProtocolError on out-of-order input: a semantic batch after
/// TextDone, a second TextDone, a speech token while no group accepts speech,
/// speech after the final token, or any input once the phase is Done.
EmitterStep emitter_next(EmitterState state, const EmitterInput& input);

EmitterDemand emitter_demand(const EmitterState& state);

}  // namespace dflow::interleave
