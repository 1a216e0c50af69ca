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

#include "dflow/interleave/emitter.h"

#include <utility>

#include "dflow/core/error.h"

namespace dflow::interleave {

namespace {

void open_group(EmitterState& s, std::size_t count,
                std::vector<InterleavedElement>& out) {
  if (s.emitted_any_group) out.emplace_back(ControlMarker::ConcatNextSemantics);
  s.emitted_any_group = true;
  for (std::size_t k = 0; k < count; ++k) {
    out.emplace_back(std::move(s.pending_semantics.front()));
    s.pending_semantics.pop_front();
  }
}

void flush_speech(EmitterState& s, std::vector<InterleavedElement>& out) {
  for (const auto& t : s.pending_speech) out.emplace_back(t);
  s.pending_speech.clear();
}

// Emits everything that is already determined by the inputs seen so far.
void settle(EmitterState& s, std::vector<InterleavedElement>& out) {
  const std::size_t n_sem = s.policy.n_semantic;
  const std::size_t n_sp = s.policy.n_speech;
  while (true) {
    if (s.phase == EmitterPhase::Mixing) {
      if (s.group_open) {
        if (s.pending_speech.size() == n_sp) {
          flush_speech(s, out);
          s.group_open = false;
          s.speech_emitted_in_group = static_cast<std::uint32_t>(n_sp);
          continue;
        }
        if (s.speech_complete) {
          // Too few tokens for this group; they are held until turn_of_speech.
          s.group_open = false;
          continue;
        }
        return;
      }
      if (s.pending_semantics.size() >= n_sem) {
        open_group(s, n_sem, out);
        if (!s.speech_complete) {
          s.group_open = true;
          s.speech_emitted_in_group = 0;
        }
        continue;
      }
      if (s.text_complete) {
        if (!s.pending_semantics.empty()) {
          open_group(s, s.pending_semantics.size(), out);
        }
        out.emplace_back(ControlMarker::TurnOfSpeech);
        s.phase = EmitterPhase::SpeechOnly;
        s.speech_emitted_in_group = 0;
        continue;
      }
      return;
    }
    if (s.phase == EmitterPhase::SpeechOnly) {
      s.speech_emitted_in_group = static_cast<std::uint32_t>(
          (s.speech_emitted_in_group + s.pending_speech.size()) % n_sp);
      flush_speech(s, out);
      if (s.speech_complete) {
        out.emplace_back(ControlMarker::EndOfSpeech);
        s.phase = EmitterPhase::Done;
      }
      return;
    }
    return;
  }
}

}  // namespace

EmitterState make_emitter(const RatioPolicy& policy) {
  validate(policy);
  EmitterState s;
  s.policy = policy;
  return s;
}

EmitterDemand emitter_demand(const EmitterState& s) {
  switch (s.phase) {
    case EmitterPhase::Done:
      return EmitterDemand::None;
    case EmitterPhase::SpeechOnly:
      return s.speech_complete ? EmitterDemand::None : EmitterDemand::Speech;
    case EmitterPhase::Mixing:
      if (s.group_open && !s.speech_complete) return EmitterDemand::Speech;
      return EmitterDemand::Semantics;
  }
  return EmitterDemand::None;
}

EmitterStep emitter_next(EmitterState state, const EmitterInput& input) {
  if (state.phase == EmitterPhase::Done) {
    throw ProtocolError("emitter input after end_of_speech");
  }
  EmitterStep step;
  if (const auto* batch = std::get_if<SemanticBatch>(&input)) {
    if (state.text_complete) {
      throw ProtocolError("semantic batch after text completion");
    }
    for (const auto& v : batch->vectors) state.pending_semantics.push_back(v);
  } else if (std::holds_alternative<TextDone>(input)) {
    if (state.text_complete) throw ProtocolError("text completion signalled twice");
    state.text_complete = true;
  } else {
    const auto& sp = std::get<SpeechInput>(input);
    if (state.speech_complete) {
      throw ProtocolError("speech token after the final speech token");
    }
    if (emitter_demand(state) != EmitterDemand::Speech) {
      throw ProtocolError("speech token while the voice decoder awaits semantics");
    }
    state.pending_speech.push_back(sp.token);
    state.speech_complete = sp.final;
  }
  settle(state, step.emissions);
  step.state = std::move(state);
  return step;
}

}  // namespace dflow::interleave
