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

#include "dflow/duplex/session.h"

#include <string>

#include "dflow/core/error.h"

namespace dflow::duplex {

std::string_view to_string(DecisionKind k) {
  switch (k) {
    case DecisionKind::NoAction: return "no_action";
    case DecisionKind::TakeTurn: return "take_turn";
    case DecisionKind::HaltAndListen: return "halt_and_listen";
  }
  return "unknown";
}

DecisionKind decision_kind_from_string(std::string_view s) {
  if (s == "no_action") return DecisionKind::NoAction;
  if (s == "take_turn") return DecisionKind::TakeTurn;
  if (s == "halt_and_listen") return DecisionKind::HaltAndListen;
  throw ValidationError("unknown duplex decision '" + std::string(s) + "'");
}

std::string_view to_string(Mode m) { return m == Mode::Listen ? "listen" : "speak"; }

std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::BeginResponse: return "begin_response";
    case ActionKind::HaltSpeech: return "halt_speech";
    case ActionKind::EmitContinue: return "emit_continue";
  }
  return "unknown";
}

TickResult session_tick(const SessionState& state, const PredictorContext& ctx,
                        const DuplexDecision& decision, TimeMs now_ms) {
  TickResult r;
  r.state = state;
  r.state.chunks_since_user_onset =
      ctx.user_speaking ? state.chunks_since_user_onset + 1 : 0;

  switch (decision.kind) {
    case DecisionKind::NoAction:
      break;
    case DecisionKind::TakeTurn:
      if (state.mode == Mode::Listen && !state.pending_halt) {
        r.actions.push_back({ActionKind::BeginResponse, ctx.chunk_index});
        r.state.mode = Mode::Speak;
        r.state.speaking_since_ms = now_ms;
      } else {
        r.coerced = true;
      }
      break;
    case DecisionKind::HaltAndListen:
      if (state.mode == Mode::Speak) {
        r.actions.push_back({ActionKind::HaltSpeech, ctx.chunk_index});
        r.state.mode = Mode::Listen;
        r.state.speaking_since_ms.reset();
        r.state.pending_halt = true;
      } else {
        r.coerced = true;
      }
      break;
  }
  return r;
}

SessionState complete_halt(SessionState state) {
  state.pending_halt = false;
  return state;
}

}  // namespace dflow::duplex
