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
#include <string>
#include <vector>

#include "dflow/core/json_util.h"
#include "dflow/core/timeline.h"
#include "dflow/core/trace.h"
#include "dflow/eval/f1.h"
#include "dflow/eval/latency_stats.h"

namespace dflow::eval {

struct EvalOptions {
  std::vector<std::int64_t> ks = {1, 5, 10};
  MatchWindow window = MatchWindow::StrictAfter;
  ChunkGrid grid;
};

struct TaskScores {
  OnsetTask task = OnsetTask::AssistantTurnTaking;
  std::vector<F1Result> at_k;  // parallel to EvalOptions::ks
};

struct EvalReport {
  EvalOptions options;
  TaskScores assistant;
  TaskScores user;
  // Unset when the labels hold no back-channel interval.
  std::optional<double> backchannel_accuracy;
  std::size_t backchannel_intervals = 0;
  LatencyReport latency;  // matched at the widest K
};

/// Throws ValidationError for an empty or negative K list or an unordered
/// trace.
EvalReport evaluate(const std::vector<TraceEvent>& trace, const DuplexLabels& labels,
                    const EvalOptions& options);

Json report_to_json(const EvalReport& r);

/// Plain-text tables: F1 per task and K, back-channel accuracy, latencies.
std::string format_report_table(const EvalReport& r);

/// Parses "1,5,10".
std::vector<std::int64_t> parse_k_list(const std::string& text);

}  // namespace dflow::eval
