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

#include "dflow/eval/f1.h"

#include <algorithm>
#include <set>
#include <string>

#include "dflow/core/error.h"

namespace dflow::eval {

std::string_view to_string(OnsetTask t) {
  return t == OnsetTask::AssistantTurnTaking ? "assistant_turn_taking" : "user_turn_taking";
}

std::string_view to_string(MatchWindow w) {
  return w == MatchWindow::StrictAfter ? "strict_after" : "symmetric";
}

MatchWindow match_window_from_string(std::string_view s) {
  if (s == "strict_after") return MatchWindow::StrictAfter;
  if (s == "symmetric") return MatchWindow::Symmetric;
  throw ValidationError("unknown match window '" + std::string(s) + "'");
}

F1Result positive_f1_at_offset_k(std::span<const std::int64_t> predictions,
                                 std::span<const std::int64_t> label_onsets, std::int64_t k,
                                 MatchWindow window) {
  if (k < 0) throw ValidationError("offset K must be >= 0");
  if (!std::is_sorted(label_onsets.begin(), label_onsets.end())) {
    throw ValidationError("label onsets must be sorted");
  }
  if (std::adjacent_find(predictions.begin(), predictions.end(),
                         [](auto a, auto b) { return a >= b; }) != predictions.end()) {
    throw ValidationError("predictions must be sorted and unique");
  }

  F1Result r;
  // Unmatched label indices; the earliest matchable one is the first whose
  // window still reaches p.
  std::set<std::size_t> open;
  for (std::size_t i = 0; i < label_onsets.size(); ++i) open.insert(i);
  for (std::size_t j = 0; j < predictions.size(); ++j) {
    const auto p = predictions[j];
    const auto lo = p - k;
    const auto hi = window == MatchWindow::StrictAfter ? p : p + k;
    auto it = std::find_if(open.begin(), open.end(), [&](std::size_t i) {
      return label_onsets[i] >= lo;
    });
    if (it != open.end() && label_onsets[*it] <= hi) {
      r.matches.emplace_back(*it, j);
      open.erase(it);
    }
  }
  r.tp = r.matches.size();
  r.fp = predictions.size() - r.tp;
  r.fn = label_onsets.size() - r.tp;
  if (predictions.empty() && label_onsets.empty()) {
    r.f1 = r.precision = r.recall = 1.0;
    return r;
  }
  if (r.tp == 0) return r;
  r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

}  // namespace dflow::eval
