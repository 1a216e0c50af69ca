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

#include "dflow/core/trace.h"

#include <array>
#include <utility>

#include "dflow/core/error.h"

namespace dflow {

namespace {

constexpr std::array<std::pair<TraceKind, std::string_view>, 9> kKindNames{{
    {TraceKind::UserSpeechStart, "user_speech_start"},
    {TraceKind::UserSpeechEnd, "user_speech_end"},
    {TraceKind::PredictorDecision, "predictor_decision"},
    {TraceKind::TextBatchEmitted, "text_batch_emitted"},
    {TraceKind::SpeechBatchEmitted, "speech_batch_emitted"},
    {TraceKind::FirstAudioPacket, "first_audio_packet"},
    {TraceKind::SpeechHalted, "speech_halted"},
    {TraceKind::MarkerEmitted, "marker_emitted"},
    {TraceKind::Error, "error"},
}};

}  // namespace

std::string_view to_string(TraceKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "unknown";
}

TraceKind trace_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kKindNames) {
    if (name == s) return kind;
  }
  throw ValidationError("unknown trace event kind '" + std::string(s) + "'");
}

std::string encode_trace_line(const TraceEvent& e) {
  Json j;
  j["t_ms"] = e.t_ms;
  j["seq"] = e.seq;
  j["session"] = e.session;
  j["kind"] = std::string(to_string(e.kind));
  j["payload"] = e.payload;
  return j.dump() + "\n";
}

TraceEvent decode_trace_line(std::string_view line) {
  const Json j = parse_json(line, "trace line");
  TraceEvent e;
  e.t_ms = required<TimeMs>(j, "t_ms");
  e.seq = required<std::uint64_t>(j, "seq");
  e.session = required<std::string>(j, "session");
  e.kind = trace_kind_from_string(required<std::string>(j, "kind"));
  auto it = j.find("payload");
  if (it != j.end()) e.payload = *it;
  return e;
}

std::string encode_trace(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (const auto& e : trace) out += encode_trace_line(e);
  return out;
}

std::vector<TraceEvent> decode_trace(std::string_view text) {
  std::vector<TraceEvent> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      out.push_back(decode_trace_line(line));
    }
    pos = nl + 1;
  }
  return out;
}

bool is_totally_ordered(const std::vector<TraceEvent>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const auto& a = trace[i - 1];
    const auto& b = trace[i];
    if (b.t_ms < a.t_ms || (b.t_ms == a.t_ms && b.seq <= a.seq)) return false;
  }
  return true;
}

}  // namespace dflow
