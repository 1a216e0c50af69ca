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
#include <span>
#include <string>
#include <vector>

#include "dflow/core/timeline.h"
#include "dflow/core/trace.h"
#include "dflow/core/types.h"
#include "dflow/eval/f1.h"

namespace dflow::eval {

/// Linear interpolation between closest ranks, q in [0, 1]. Throws
/// UndefinedMetricError on an empty sample.
double percentile(std::vector<double> samples, double q);

struct LatencyStats {
  std::size_t count = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p90_ms = 0.0;
};

/// All zero for an empty sample.
LatencyStats summarize(std::span<const double> samples_ms);

struct TaskLatency {
  std::vector<double> samples_ms;
  LatencyStats stats;
};

struct LatencyReport {
  TaskLatency assistant;  // first audio packet minus labeled assistant onset
  TaskLatency user;       // speech halt minus labeled user onset
  std::size_t warnings = 0;
  std::vector<std::string> warning_messages;
};

/// Chunk indices of traced predictor decisions of the given kind, sorted and
/// unique. Coerced decisions count as predictions.
OnsetPredictions extract_predictions(const std::vector<TraceEvent>& trace, OnsetTask task);

/// Decision chunks at which assistant speech was actually halted.
std::vector<std::int64_t> halt_chunks(const std::vector<TraceEvent>& trace);

std::vector<std::int64_t> onsets_to_chunks(std::span<const double> onsets_s,
                                           const ChunkGrid& grid);

/// Latencies of true-positive decisions under F1@K matching at `k`. A trace
/// without predictor decisions yields empty stats and one warning; a matched
/// decision whose outcome event is missing adds a warning and no sample.
/// Throws ValidationError if the trace is not totally ordered.
LatencyReport response_latency_stats(const std::vector<TraceEvent>& trace,
                                     const DuplexLabels& labels, const ChunkGrid& grid,
                                     std::int64_t k,
                                     MatchWindow window = MatchWindow::StrictAfter);

}  // namespace dflow::eval
