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

#include "dflow/stagebus/engine.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "dflow/core/error.h"
#include "dflow/interleave/latency_model.h"
#include "dflow/stagebus/hash.h"

namespace dflow::stagebus {

namespace {

std::size_t role_index(StageRole r) { return static_cast<std::size_t>(r); }

}  // namespace

ConfigurePayload configure_payload(const Scenario& s) {
  ConfigurePayload c;
  c.seed = s.seed;
  c.codebook_size = s.codebook_size;
  c.hidden_width = s.hidden_width;
  c.text_vocab = s.text_vocab;
  c.feature_width = s.feature_width;
  c.predictor = s.predictor;
  return c;
}

Engine::Engine(const Scenario& scenario, const std::vector<StageDescriptor>& stages,
               StageBackend& backend, Options options)
    : scenario_(scenario), backend_(backend), options_(options) {
  validate(scenario_);
  std::array<bool, 5> seen{};
  for (const auto& d : stages) {
    validate(d);
    stages_[role_index(d.role)] = d;
    seen[role_index(d.role)] = true;
  }
  for (auto r : kAllRoles) {
    if (!seen[role_index(r)]) {
      throw ValidationError("no stage descriptor for role " + std::string(to_string(r)));
    }
  }
  last_chunk_ = ms_to_chunk(seconds_to_ms(scenario_.timeline.duration_s), scenario_.grid);

  // User boundaries go in first so they precede a tick at the same time.
  const auto& segs = scenario_.timeline.segments;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].channel != Channel::User) continue;
    auto start = make_event(Kind::UserStart);
    start.segment = i;
    clock_.schedule(seconds_to_ms(segs[i].start_s), start);
    auto end = make_event(Kind::UserEnd);
    end.segment = i;
    clock_.schedule(seconds_to_ms(segs[i].end_s), end);
  }
  injected_segments_ = segs.size();
  auto tick = make_event(Kind::Tick);
  tick.chunk = 0;
  clock_.schedule(0, tick);
}

void Engine::user_speech_start(TimeMs at) {
  auto ev = make_event(Kind::UserStart);
  ev.segment = injected_segments_;
  clock_.schedule(at, ev);
}

void Engine::user_speech_end(TimeMs at) {
  auto ev = make_event(Kind::UserEnd);
  ev.segment = injected_segments_++;
  clock_.schedule(at, ev);
}

void Engine::run_until(TimeMs t) {
  while (!aborted_ && !clock_.empty() && *clock_.next_time() <= t) handle(clock_.pop().event);
  clock_.advance_to(t);
}

void Engine::run_to_completion() {
  while (!aborted_ && !clock_.empty()) handle(clock_.pop().event);
}

std::vector<TraceEvent> Engine::take_new_events() {
  std::vector<TraceEvent> out(trace_.begin() + static_cast<std::ptrdiff_t>(delivered_),
                              trace_.end());
  delivered_ = trace_.size();
  return out;
}

const StageDescriptor& Engine::stage(StageRole role) const { return stages_[role_index(role)]; }

TimeMs Engine::stage_cost(StageRole role, double base_ms) {
  const auto& d = stage(role);
  double jitter = 0.0;
  if (d.jitter_ms > 0.0) {
    const auto h = pinned_hash("jitter", scenario_.seed, scenario_.session, role_index(role),
                               jitter_draws_[role_index(role)]++);
    jitter = hash_to_unit(h) * d.jitter_ms;
  }
  return round_half_up_ms(base_ms + jitter);
}

void Engine::emit(TraceKind kind, Json payload) {
  trace_.push_back(
      TraceEvent{clock_.now(), trace_.size(), scenario_.session, kind, std::move(payload)});
}

void Engine::abort_session(const std::string& message) {
  emit(TraceKind::Error, Json{{"reason", "protocol"}, {"message", message}});
  aborted_ = true;
  clock_.clear();
}

void Engine::handle(const Event& ev) {
  try {
    switch (ev.kind) {
      case Kind::UserStart:
        if (activity_.speaking) return;
        activity_ = {true, clock_.now(), std::nullopt};
        emit(TraceKind::UserSpeechStart, Json{{"segment", ev.segment}});
        return;
      case Kind::UserEnd:
        if (!activity_.speaking) return;
        activity_.speaking = false;
        activity_.segment_end_ms = clock_.now();
        emit(TraceKind::UserSpeechEnd, Json{{"segment", ev.segment}});
        return;
      case Kind::Tick:
        on_tick(ev);
        return;
      case Kind::Decision:
        on_decision(ev);
        return;
      case Kind::TextDone:
      case Kind::SpeechDone:
      case Kind::SynthDone:
        if (!turn_ || ev.generation != generation_) return;  // cancelled by a halt
        if (ev.kind == Kind::TextDone) on_text_done(ev);
        else if (ev.kind == Kind::SpeechDone) on_speech_done(ev);
        else on_synth_done(ev);
        return;
    }
  } catch (const ProtocolError& e) {
    abort_session(e.what());
  }
}

void Engine::on_tick(const Event& ev) {
  const bool speaking = state_.mode == duplex::Mode::Speak;
  duplex::PredictorContext ctx;
  ctx.chunk_index = ev.chunk;
  ctx.user_speaking = activity_.speaking;
  ctx.assistant_speaking = speaking;
  ctx.feature_vector =
      duplex::activity_features(activity_, speaking, clock_.now(), scenario_.feature_width);

  auto decision = make_event(Kind::Decision);
  decision.chunk = ev.chunk;
  decision.decision = backend_.predict(ctx);
  decision.ctx = std::move(ctx);
  clock_.schedule(clock_.now() + stage_cost(StageRole::DuplexPredictor,
                                            stage(StageRole::DuplexPredictor).per_unit_latency_ms),
                  std::move(decision));

  if (options_.open_ended || ev.chunk < last_chunk_) {
    auto next = make_event(Kind::Tick);
    next.chunk = ev.chunk + 1;
    clock_.schedule(chunk_start_ms(next.chunk, scenario_.grid), next);
  }
}

void Engine::on_decision(const Event& ev) {
  const auto& d = ev.decision;
  if (!std::isfinite(d.confidence) || d.confidence < 0.0 || d.confidence > 1.0) {
    throw ProtocolError("predictor confidence outside [0, 1]");
  }
  const auto r = duplex::session_tick(state_, ev.ctx, d, clock_.now());
  state_ = r.state;
  std::optional<duplex::ActionKind> action;
  if (!r.actions.empty()) action = r.actions.front().kind;

  if (d.kind != duplex::DecisionKind::NoAction) {
    Json p{{"chunk", ev.chunk},
           {"decision", std::string(duplex::to_string(d.kind))},
           {"confidence", d.confidence},
           {"action", action ? std::string(duplex::to_string(*action)) : std::string("none")},
           {"coerced", r.coerced}};
    if (action == duplex::ActionKind::BeginResponse) p["turn"] = turns_started_;
    if (action == duplex::ActionKind::HaltSpeech && turn_) p["turn"] = turn_->index;
    emit(TraceKind::PredictorDecision, std::move(p));
  }
  if (action == duplex::ActionKind::BeginResponse) begin_response(ev.chunk);
  if (action == duplex::ActionKind::HaltSpeech) halt_speech(ev.chunk);
}

void Engine::begin_response(std::int64_t chunk) {
  Turn t;
  t.index = turns_started_++;
  t.plan = scenario_.plan_for_turn(t.index);
  t.decision_chunk = chunk;
  t.emitter = interleave::make_emitter(scenario_.policy);
  turn_ = std::move(t);
  ++generation_;
  const TimeMs encoder =
      stage_cost(StageRole::VoiceEncoder, stage(StageRole::VoiceEncoder).per_unit_latency_ms);
  schedule_text_batch(encoder);
}

void Engine::schedule_text_batch(TimeMs extra_ms) {
  Turn& t = *turn_;
  const auto remaining = t.plan.text_tokens - t.text_next;
  const auto count =
      static_cast<std::uint32_t>(std::min<std::uint64_t>(remaining, scenario_.policy.n_semantic));
  const double d_llm = stage(StageRole::TextLlm).per_unit_latency_ms;
  double base = d_llm * count;
  if (t.text_batches == 0 && count > 0) {
    LatencyProfile p = scenario_.profile;
    p.d_llm = d_llm;
    base = interleave::first_text_batch_cost(p, scenario_.policy, count);
  }
  auto ev = make_event(Kind::TextDone);
  ev.generation = generation_;
  ev.batch = t.text_batches;
  ev.first_index = t.text_next;
  ev.count = count;
  const TimeMs cost = count > 0 ? stage_cost(StageRole::TextLlm, base) : 0;
  clock_.schedule(clock_.now() + extra_ms + cost, ev);
}

void Engine::on_text_done(const Event& ev) {
  Turn& t = *turn_;
  if (ev.count > 0) {
    auto content = backend_.text_batch(t.index, ev.batch, ev.first_index, ev.count);
    if (content.semantics.size() != ev.count) {
      throw ProtocolError("text LLM returned the wrong number of semantic vectors");
    }
    for (const auto& v : content.semantics) {
      validate_semantic_vector(v, scenario_.hidden_width);
    }
    t.text_next += ev.count;
    ++t.text_batches;
    emit(TraceKind::TextBatchEmitted, Json{{"turn", t.index},
                                           {"batch", ev.batch},
                                           {"first_index", ev.first_index},
                                           {"count", ev.count}});
    feed(interleave::SemanticBatch{std::move(content.semantics)});
  }
  if (turn_->text_next >= turn_->plan.text_tokens) {
    feed(interleave::TextDone{});
  } else {
    schedule_text_batch(0);
  }
  pump();
}

void Engine::on_speech_done(const Event& ev) {
  Turn& t = *turn_;
  t.lm_busy = false;
  auto tokens = backend_.speech_batch(t.index, ev.batch, ev.first_index, ev.count, ev.final);
  if (tokens.size() != ev.count) {
    throw ProtocolError("voice token LM returned the wrong number of tokens");
  }
  t.speech_next += ev.count;
  ++t.speech_batches;
  emit(TraceKind::SpeechBatchEmitted, Json{{"turn", t.index},
                                           {"batch", ev.batch},
                                           {"first_index", ev.first_index},
                                           {"count", ev.count},
                                           {"final", ev.final}});
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    make_speech_token(tokens[i].id, scenario_.codebook_size);
    feed(interleave::SpeechInput{tokens[i], ev.final && i + 1 == tokens.size()});
  }
  pump();
}

void Engine::on_synth_done(const Event& ev) {
  Turn& t = *turn_;
  backend_.synthesize(t.index, ev.batch, ev.first_index, t.synth_inflight, ev.final);
  t.synth_busy = false;
  t.synthesized += t.synth_inflight.size();
  t.synth_inflight.clear();
  if (t.audio_chunks++ == 0) {
    const TimeMs decided = chunk_start_ms(t.decision_chunk, scenario_.grid);
    emit(TraceKind::FirstAudioPacket, Json{{"turn", t.index},
                                           {"decision_chunk", t.decision_chunk},
                                           {"tokens", ev.count},
                                           {"latency_ms", clock_.now() - decided}});
  }
  pump();
}

void Engine::feed(const interleave::EmitterInput& input) {
  Turn& t = *turn_;
  auto step = interleave::emitter_next(std::move(t.emitter), input);
  t.emitter = std::move(step.state);
  for (const auto& e : step.emissions) {
    if (const auto* m = std::get_if<ControlMarker>(&e)) {
      backend_.marker(t.index, *m);
      emit(TraceKind::MarkerEmitted,
           Json{{"turn", t.index}, {"marker", std::string(to_string(*m))}});
    } else if (const auto* s = std::get_if<SpeechToken>(&e)) {
      t.synth_queue.push_back(*s);
    }
  }
}

void Engine::pump() {
  if (!turn_) return;
  Turn& t = *turn_;
  const std::uint32_t n_sp = scenario_.policy.n_speech;

  if (!t.lm_busy && interleave::emitter_demand(t.emitter) == interleave::EmitterDemand::Speech &&
      t.speech_next < t.plan.speech_tokens) {
    std::uint64_t want = n_sp;
    if (t.emitter.phase == interleave::EmitterPhase::Mixing) {
      want = n_sp - t.emitter.pending_speech.size();
    }
    const auto count =
        static_cast<std::uint32_t>(std::min<std::uint64_t>(want, t.plan.speech_tokens - t.speech_next));
    auto ev = make_event(Kind::SpeechDone);
    ev.generation = generation_;
    ev.batch = t.speech_batches;
    ev.first_index = t.speech_next;
    ev.count = count;
    ev.final = t.speech_next + count == t.plan.speech_tokens;
    t.lm_busy = true;
    clock_.schedule(clock_.now() + stage_cost(StageRole::VoiceTokenLm,
                                              stage(StageRole::VoiceTokenLm).per_unit_latency_ms *
                                                  count),
                    ev);
  }

  const bool done = t.emitter.phase == interleave::EmitterPhase::Done;
  if (!t.synth_busy && !t.synth_queue.empty() && (t.synth_queue.size() >= n_sp || done)) {
    const auto count = std::min<std::size_t>(n_sp, t.synth_queue.size());
    auto ev = make_event(Kind::SynthDone);
    ev.generation = generation_;
    ev.batch = t.audio_chunks;
    ev.first_index = t.synthesized;
    ev.count = static_cast<std::uint32_t>(count);
    t.synth_inflight.assign(t.synth_queue.begin(),
                            t.synth_queue.begin() + static_cast<std::ptrdiff_t>(count));
    t.synth_queue.erase(t.synth_queue.begin(),
                        t.synth_queue.begin() + static_cast<std::ptrdiff_t>(count));
    ev.final = done && t.synth_queue.empty();
    t.synth_busy = true;
    clock_.schedule(clock_.now() + stage_cost(StageRole::Token2Wav,
                                              stage(StageRole::Token2Wav).per_unit_latency_ms *
                                                  static_cast<double>(count)),
                    ev);
  }
}

void Engine::halt_speech(std::int64_t chunk) {
  if (turn_) {
    const Turn& t = *turn_;
    emit(TraceKind::SpeechHalted, Json{{"turn", t.index},
                                       {"chunk", chunk},
                                       {"speech_tokens_generated", t.speech_next},
                                       {"speech_tokens_synthesized", t.synthesized},
                                       {"speech_tokens_planned", t.plan.speech_tokens},
                                       {"audio_chunks", t.audio_chunks}});
  }
  turn_.reset();
  ++generation_;
  state_ = duplex::complete_halt(state_);
}

std::vector<TraceEvent> run_simulation(const Scenario& scenario,
                                       const std::vector<StageDescriptor>& stages,
                                       const SimulationOptions& options) {
  validate(scenario);
  const auto config = configure_payload(scenario);
  BuiltinBackend builtin(scenario.session, config);

  std::map<std::string, std::vector<StageRole>> endpoints;
  std::map<StageRole, std::string> endpoint_of;
  for (const auto& d : stages) {
    validate(d);
    if (d.endpoint == kBuiltinEndpoint) continue;
    endpoints[d.endpoint].push_back(d.role);
    endpoint_of[d.role] = d.endpoint;
  }
  std::map<std::string, std::unique_ptr<ExternalStage>> clients;
  for (const auto& [endpoint, roles] : endpoints) {
    auto client = std::make_unique<ExternalStage>(options.connect(endpoint), scenario.session,
                                                  options.stage_timeout);
    try {
      client->handshake(scenario.policy, scenario.profile, roles, config);
    } catch (const ProtocolError& e) {
      return {TraceEvent{0, 0, scenario.session, TraceKind::Error,
                         Json{{"reason", "protocol"}, {"message", e.what()}}}};
    }
    clients[endpoint] = std::move(client);
  }
  auto pick = [&](StageRole r) -> StageBackend* {
    auto it = endpoint_of.find(r);
    if (it == endpoint_of.end()) return &builtin;
    return clients.at(it->second).get();
  };
  RoutedBackend routed(pick(StageRole::TextLlm), pick(StageRole::VoiceTokenLm),
                       pick(StageRole::Token2Wav), pick(StageRole::DuplexPredictor));
  Engine engine(scenario, stages, routed);
  engine.run_to_completion();
  return engine.trace();
}

}  // namespace dflow::stagebus
