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
#include <optional>
#include <string_view>
#include <vector>

#include "dflow/core/types.h"

namespace dflow::duplex {

enum class DecisionKind { NoAction, TakeTurn, HaltAndListen };

std::string_view to_string(DecisionKind k);
DecisionKind decision_kind_from_string(std::string_view s);

struct DuplexDecision {
  DecisionKind kind = DecisionKind::NoAction;
  double confidence = 0.0;  // in [0, 1]

  friend bool operator==(const DuplexDecision&, const DuplexDecision&) = default;
};

enum class Mode { Listen, Speak };

std::string_view to_string(Mode m);

struct SessionState {
  Mode mode = Mode::Listen;
  std::optional<TimeMs> speaking_since_ms;  // set iff mode == Speak
  std::uint32_t chunks_since_user_onset = 0;
  // Set by HaltSpeech until the engine has drained the cancelled turn.
  bool pending_halt = false;

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

/// Input to a predictor for one chunk tick.
struct PredictorContext {
  std::vector<double> feature_vector;
  bool user_speaking = false;
  bool assistant_speaking = false;
  std::int64_t chunk_index = 0;
};

enum class ActionKind { BeginResponse, HaltSpeech, EmitContinue };

std::string_view to_string(ActionKind k);

struct SessionAction {
  ActionKind kind;
  std::int64_t at_chunk = 0;

  friend bool operator==(const SessionAction&, const SessionAction&) = default;
};

struct TickResult {
  std::vector<SessionAction> actions;
  SessionState state;
  // The decision asked for a transition the current mode cannot take and was
  // treated as NoAction.
  bool coerced = false;
};

/// Applies one predictor decision at the tick it arrives.
///  Listen + TakeTurn      -> [BeginResponse], mode Speak
///  Speak  + HaltAndListen -> [HaltSpeech], mode Listen, pending_halt set
///  anything else          -> [] (TakeTurn in Speak, HaltAndListen in Listen and
///                            TakeTurn while a halt is pending are coerced)
TickResult session_tick(const SessionState& state, const PredictorContext& ctx,
                        const DuplexDecision& decision, TimeMs now_ms);

/// Clears pending_halt once the engine has cancelled the interrupted turn.
SessionState complete_halt(SessionState state);

}  // namespace dflow::duplex
