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
#include <string>
#include <string_view>
#include <vector>

#include "dflow/core/json_util.h"
#include "dflow/core/types.h"

namespace dflow {

enum class TraceKind {
  UserSpeechStart,
  UserSpeechEnd,
  PredictorDecision,
  TextBatchEmitted,
  SpeechBatchEmitted,
  FirstAudioPacket,
  SpeechHalted,
  MarkerEmitted,
  Error,
};

std::string_view to_string(TraceKind k);
TraceKind trace_kind_from_string(std::string_view s);

/// A timestamped simulation record. Within a trace, events are totally ordered
/// by (t_ms, seq); seq is the event's position in the trace.
struct TraceEvent {
  TimeMs t_ms = 0;
  std::uint64_t seq = 0;
  std::string session;
  TraceKind kind = TraceKind::Error;
  Json payload = Json::object();

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// One canonical JSON line (t_ms, seq, session, kind, payload) with trailing
/// newline.
std::string encode_trace_line(const TraceEvent& e);
TraceEvent decode_trace_line(std::string_view line);

std::string encode_trace(const std::vector<TraceEvent>& trace);
/// Parses JSONL; blank lines are skipped.
std::vector<TraceEvent> decode_trace(std::string_view text);

/// True if events are sorted by (t_ms, seq).
bool is_totally_ordered(const std::vector<TraceEvent>& trace);

}  // namespace dflow
