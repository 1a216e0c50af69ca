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

#include <array>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "dflow/core/trace.h"
#include "dflow/duplex/session.h"
#include "dflow/interleave/emitter.h"
#include "dflow/stagebus/backend.h"
#include "dflow/stagebus/clock.h"
#include "dflow/stagebus/external_stage.h"
#include "dflow/stagebus/scenario.h"
#include "dflow/stagebus/transport.h"

namespace dflow::stagebus {

/// Event-driven orchestration of one session on a virtual clock.
///
/// Every chunk tick asks the predictor for a decision, which takes effect
/// d_pred later. A turn runs the text LLM batch by batch, feeds semantic
/// vectors through the streaming interleaver, generates speech tokens as the
/// interleaver asks for them and synthesizes them in n_speech chunks. The first
/// finished chunk is the turn's first audio packet. A halt discards all pending
/// work of the turn.
class Engine {
 public:
  struct Options {
    // Keep ticking past the timeline (interactive use).
    bool open_ended = false;
  };

  Engine(const Scenario& scenario, const std::vector<StageDescriptor>& stages,
         StageBackend& backend, Options options);
  Engine(const Scenario& scenario, const std::vector<StageDescriptor>& stages,
         StageBackend& backend)
      : Engine(scenario, stages, backend, Options{}) {}

  /// Injects a user speech boundary at `at` (>= now()).
  void user_speech_start(TimeMs at);
  void user_speech_end(TimeMs at);

  /// Processes every event with time <= t and advances now() to t.
  void run_until(TimeMs t);
  void run_to_completion();

  TimeMs now() const { return clock_.now(); }
  bool aborted() const { return aborted_; }
  const duplex::SessionState& session_state() const { return state_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }
  /// Events traced since the previous call.
  std::vector<TraceEvent> take_new_events();

 private:
  enum class Kind { UserStart, UserEnd, Tick, Decision, TextDone, SpeechDone, SynthDone };
  struct Event {
    Kind kind = Kind::Tick;
    std::int64_t chunk = 0;
    std::uint64_t generation = 0;
    std::uint32_t batch = 0;
    std::uint64_t first_index = 0;
    std::uint32_t count = 0;
    bool final = false;
    std::size_t segment = 0;
    duplex::DuplexDecision decision;
    duplex::PredictorContext ctx;
  };
  static Event make_event(Kind k) {
    Event e;
    e.kind = k;
    return e;
  }
  struct Turn {
    std::uint32_t index = 0;
    ResponsePlan plan;
    std::int64_t decision_chunk = 0;
    interleave::EmitterState emitter;
    std::uint64_t text_next = 0;
    std::uint32_t text_batches = 0;
    std::uint64_t speech_next = 0;
    std::uint32_t speech_batches = 0;
    bool lm_busy = false;
    std::deque<SpeechToken> synth_queue;
    std::vector<SpeechToken> synth_inflight;
    std::uint64_t synthesized = 0;
    std::uint32_t audio_chunks = 0;
    bool synth_busy = false;
  };

  void handle(const Event& ev);
  void on_tick(const Event& ev);
  void on_decision(const Event& ev);
  void begin_response(std::int64_t chunk);
  void halt_speech(std::int64_t chunk);
  void schedule_text_batch(TimeMs extra_ms);
  void on_text_done(const Event& ev);
  void on_speech_done(const Event& ev);
  void on_synth_done(const Event& ev);
  void feed(const interleave::EmitterInput& input);
  void pump();

  TimeMs stage_cost(StageRole role, double base_ms);
  const StageDescriptor& stage(StageRole role) const;
  void emit(TraceKind kind, Json payload);
  void abort_session(const std::string& message);

  Scenario scenario_;
  std::array<StageDescriptor, 5> stages_;
  StageBackend& backend_;
  Options options_;
  VirtualClock<Event> clock_;
  std::vector<TraceEvent> trace_;
  std::size_t delivered_ = 0;
  duplex::SessionState state_;
  duplex::UserActivity activity_;
  std::size_t injected_segments_ = 0;
  std::int64_t last_chunk_ = 0;
  std::optional<Turn> turn_;
  std::uint64_t generation_ = 0;
  std::uint32_t turns_started_ = 0;
  std::array<std::uint64_t, 5> jitter_draws_{};
  bool aborted_ = false;
};

struct SimulationOptions {
  std::chrono::milliseconds stage_timeout = kDefaultStageTimeout;
  // Opens non-builtin endpoints; replaceable for in-process testing.
  std::function<std::unique_ptr<LineChannel>(std::string_view)> connect = connect_endpoint;
};

/// Runs the scenario to completion. Stages with an external endpoint are
/// reached through the stage protocol (one connection per distinct endpoint).
/// Throws ValidationError for an invalid scenario or a missing stage role and
/// StageError when an external stage is unreachable or times out. A protocol
/// violation instead ends the trace with one error event.
std::vector<TraceEvent> run_simulation(const Scenario& scenario,
                                       const std::vector<StageDescriptor>& stages,
                                       const SimulationOptions& options = {});

/// Stage wire configuration derived from a scenario.
ConfigurePayload configure_payload(const Scenario& scenario);

}  // namespace dflow::stagebus
