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
#include <random>
#include <string>
#include <vector>

#include "dflow/core/types.h"
#include "dflow/interleave/emitter.h"

namespace dflow::testing {

/// Semantic vector i carries i in its first component so outputs can be named.
inline std::vector<SemanticVector> numbered_semantics(std::size_t n) {
  std::vector<SemanticVector> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i].values = {static_cast<double>(i), 0.0};
  return v;
}

inline std::vector<SpeechToken> numbered_speech(std::size_t n) {
  std::vector<SpeechToken> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i].id = static_cast<std::uint32_t>(i);
  return v;
}

inline std::string label(const InterleavedElement& e) {
  if (const auto* s = std::get_if<SemanticVector>(&e)) {
    return "S" + std::to_string(static_cast<long long>(s->values.at(0)));
  }
  if (const auto* p = std::get_if<SpeechToken>(&e)) return "P" + std::to_string(p->id);
  switch (std::get<ControlMarker>(e)) {
    case ControlMarker::ConcatNextSemantics: return "<cns>";
    case ControlMarker::TurnOfSpeech: return "<tos>";
    case ControlMarker::EndOfSpeech: return "<eos>";
  }
  return "?";
}

inline std::vector<std::string> labels(const std::vector<InterleavedElement>& seq) {
  std::vector<std::string> out;
  for (const auto& e : seq) out.push_back(label(e));
  return out;
}

/// Feeds the emitter the way a pipeline would: semantic batches of n_semantic
/// (the last one partial) and speech tokens one at a time, only when the
/// emitter asks for speech. The order of text and speech arrivals is drawn
/// from rng so the text side may run ahead or lag.
inline std::vector<InterleavedElement> stream_through_emitter(
    const std::vector<SemanticVector>& semantics, const std::vector<SpeechToken>& speech,
    const RatioPolicy& policy, std::mt19937_64& rng) {
  using namespace interleave;
  auto state = make_emitter(policy);
  std::vector<InterleavedElement> out;
  std::size_t si = 0, pi = 0;
  bool text_done = false;
  auto apply = [&](const EmitterInput& in) {
    auto step = emitter_next(std::move(state), in);
    state = std::move(step.state);
    out.insert(out.end(), step.emissions.begin(), step.emissions.end());
  };
  while (state.phase != EmitterPhase::Done) {
    const bool speech_wanted = emitter_demand(state) == EmitterDemand::Speech && pi < speech.size();
    const bool text_left = !text_done;
    const bool take_text = text_left && (!speech_wanted || (rng() & 1));
    if (take_text) {
      if (si < semantics.size()) {
        const std::size_t n = std::min<std::size_t>(policy.n_semantic, semantics.size() - si);
        SemanticBatch b;
        b.vectors.assign(semantics.begin() + si, semantics.begin() + si + n);
        si += n;
        apply(b);
      } else {
        text_done = true;
        apply(TextDone{});
      }
    } else if (speech_wanted) {
      const bool final = pi + 1 == speech.size();
      apply(SpeechInput{speech[pi++], final});
    } else {
      break;  // stalled: reported by the caller comparing outputs
    }
  }
  return out;
}

}  // namespace dflow::testing
