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
#include <string_view>
#include <utility>
#include <vector>

namespace dflow::eval {

enum class OnsetTask { AssistantTurnTaking, UserTurnTaking };

std::string_view to_string(OnsetTask t);

struct OnsetPredictions {
  OnsetTask task = OnsetTask::AssistantTurnTaking;
  std::vector<std::int64_t> chunk_indices;  // sorted, unique
};

/// StrictAfter: prediction p may match label g iff g <= p <= g + K.
/// Symmetric: iff |p - g| <= K.
enum class MatchWindow { StrictAfter, Symmetric };

std::string_view to_string(MatchWindow w);
MatchWindow match_window_from_string(std::string_view s);

struct F1Result {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  // (label index, prediction index) of each true positive.
  std::vector<std::pair<std::size_t, std::size_t>> matches;
};

/// Positive-class F1 under one-to-one matching. Predictions are taken in order
/// and each claims the earliest unmatched label whose window contains it; with
/// equal-width windows this greedy matching is maximum. F1 is 0 when TP = 0,
/// except that no labels and no predictions score 1. Throws ValidationError for
/// K < 0, unsorted inputs or repeated predictions.
F1Result positive_f1_at_offset_k(std::span<const std::int64_t> predictions,
                                 std::span<const std::int64_t> label_onsets, std::int64_t k,
                                 MatchWindow window = MatchWindow::StrictAfter);

inline F1Result positive_f1_at_offset_k(const OnsetPredictions& preds,
                                        std::span<const std::int64_t> label_onsets,
                                        std::int64_t k,
                                        MatchWindow window = MatchWindow::StrictAfter) {
  return positive_f1_at_offset_k(preds.chunk_indices, label_onsets, k, window);
}

}  // namespace dflow::eval
