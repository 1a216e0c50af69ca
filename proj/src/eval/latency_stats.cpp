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

#include "dflow/eval/latency_stats.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dflow/core/error.h"

namespace dflow::eval {

namespace {

std::string_view decision_name(OnsetTask task) {
  return task == OnsetTask::AssistantTurnTaking ? "take_turn" : "halt_and_listen";
}

}  // namespace

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) throw UndefinedMetricError("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("percentile rank must lie in [0, 1]");
  std::sort(samples.begin(), samples.end());
  const double h = q * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (h - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

LatencyStats summarize(std::span<const double> samples_ms) {
  LatencyStats s;
  if (samples_ms.empty()) return s;
  std::vector<double> v(samples_ms.begin(), samples_ms.end());
  s.count = v.size();
  s.mean_ms = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  s.p50_ms = percentile(v, 0.5);
  s.p90_ms = percentile(v, 0.9);
  return s;
}

OnsetPredictions extract_predictions(const std::vector<TraceEvent>& trace, OnsetTask task) {
  OnsetPredictions preds{task, {}};
  for (const auto& e : trace) {
    if (e.kind != TraceKind::PredictorDecision) continue;
    if (optional_or<std::string>(e.payload, "decision", "") != decision_name(task)) continue;
    preds.chunk_indices.push_back(required<std::int64_t>(e.payload, "chunk"));
  }
  std::sort(preds.chunk_indices.begin(), preds.chunk_indices.end());
  preds.chunk_indices.erase(std::unique(preds.chunk_indices.begin(), preds.chunk_indices.end()),
                            preds.chunk_indices.end());
  return preds;
}

std::vector<std::int64_t> halt_chunks(const std::vector<TraceEvent>& trace) {
  std::vector<std::int64_t> out;
  for (const auto& e : trace) {
    if (e.kind == TraceKind::SpeechHalted) out.push_back(required<std::int64_t>(e.payload, "chunk"));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::int64_t> onsets_to_chunks(std::span<const double> onsets_s,
                                           const ChunkGrid& grid) {
  std::vector<std::int64_t> out;
  out.reserve(onsets_s.size());
  for (double t : onsets_s) out.push_back(time_to_chunk(t, grid));
  return out;
}

LatencyReport response_latency_stats(const std::vector<TraceEvent>& trace,
                                     const DuplexLabels& labels, const ChunkGrid& grid,
                                     std::int64_t k, MatchWindow window) {
  if (!is_totally_ordered(trace)) {
    throw ValidationError("trace is not ordered by (t_ms, seq)");
  }
  LatencyReport report;
  const bool has_decisions = std::any_of(trace.begin(), trace.end(), [](const auto& e) {
    return e.kind == TraceKind::PredictorDecision;
  });
  if (!has_decisions) {
    report.warnings = 1;
    report.warning_messages.push_back("trace holds no predictor decisions");
    return report;
  }

  // Outcome time per decision chunk.
  std::map<std::int64_t, std::uint32_t> turn_of_take;
  std::map<std::uint32_t, TimeMs> first_audio_of_turn;
  std::map<std::int64_t, TimeMs> halt_at_chunk;
  for (const auto& e : trace) {
    if (e.kind == TraceKind::PredictorDecision &&
        optional_or<std::string>(e.payload, "action", "") == "begin_response") {
      turn_of_take[required<std::int64_t>(e.payload, "chunk")] =
          required<std::uint32_t>(e.payload, "turn");
    } else if (e.kind == TraceKind::FirstAudioPacket) {
      first_audio_of_turn.emplace(required<std::uint32_t>(e.payload, "turn"), e.t_ms);
    } else if (e.kind == TraceKind::SpeechHalted) {
      halt_at_chunk.emplace(required<std::int64_t>(e.payload, "chunk"), e.t_ms);
    }
  }

  auto collect = [&](OnsetTask task, const std::vector<double>& onsets_s, TaskLatency& out) {
    const auto preds = extract_predictions(trace, task);
    const auto label_chunks = onsets_to_chunks(onsets_s, grid);
    const auto f1 = positive_f1_at_offset_k(preds, label_chunks, k, window);
    for (const auto& [li, pi] : f1.matches) {
      const auto chunk = preds.chunk_indices[pi];
      std::optional<TimeMs> outcome;
      if (task == OnsetTask::AssistantTurnTaking) {
        if (auto t = turn_of_take.find(chunk); t != turn_of_take.end()) {
          if (auto a = first_audio_of_turn.find(t->second); a != first_audio_of_turn.end()) {
            outcome = a->second;
          }
        }
      } else if (auto h = halt_at_chunk.find(chunk); h != halt_at_chunk.end()) {
        outcome = h->second;
      }
      if (!outcome) {
        ++report.warnings;
        report.warning_messages.push_back(std::string(to_string(task)) + ": decision at chunk " +
                                          std::to_string(chunk) + " has no outcome event");
        continue;
      }
      out.samples_ms.push_back(static_cast<double>(*outcome - seconds_to_ms(onsets_s[li])));
    }
    out.stats = summarize(out.samples_ms);
  };
  collect(OnsetTask::AssistantTurnTaking, labels.assistant_turn_onsets, report.assistant);
  collect(OnsetTask::UserTurnTaking, labels.user_turn_onsets, report.user);
  return report;
}

}  // namespace dflow::eval
