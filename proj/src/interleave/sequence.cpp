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

#include "dflow/interleave/sequence.h"

#include <algorithm>
#include <string>

#include "dflow/core/error.h"

namespace dflow::interleave {

std::vector<InterleavedElement> build_interleaved_sequence(
    std::span<const SemanticVector> semantics, std::span<const SpeechToken> speech,
    const RatioPolicy& policy) {
  validate(policy);
  if (speech.empty()) {
    throw ValidationError("a turn must synthesize at least one speech token");
  }
  const std::size_t n_sem = policy.n_semantic;
  const std::size_t n_sp = policy.n_speech;

  std::vector<InterleavedElement> out;
  out.reserve(semantics.size() + speech.size() + semantics.size() / n_sem + 3);

  std::size_t si = 0;
  std::size_t pi = 0;
  bool first_group = true;
  auto open_group = [&](std::size_t count) {
    if (!first_group) out.emplace_back(ControlMarker::ConcatNextSemantics);
    first_group = false;
    for (std::size_t k = 0; k < count; ++k) out.emplace_back(semantics[si++]);
  };

  while (semantics.size() - si >= n_sem && speech.size() - pi >= n_sp) {
    open_group(n_sem);
    for (std::size_t k = 0; k < n_sp; ++k) out.emplace_back(speech[pi++]);
  }
  while (si < semantics.size()) {
    open_group(std::min(n_sem, semantics.size() - si));
  }
  out.emplace_back(ControlMarker::TurnOfSpeech);
  while (pi < speech.size()) out.emplace_back(speech[pi++]);
  out.emplace_back(ControlMarker::EndOfSpeech);
  return out;
}

std::vector<std::string> check_sequence_invariants(
    std::span<const InterleavedElement> seq, const RatioPolicy& policy) {
  std::vector<std::string> problems;
  const auto tos_count = std::count_if(seq.begin(), seq.end(), [](const auto& e) {
    return is_marker(e, ControlMarker::TurnOfSpeech);
  });
  const auto eos_count = std::count_if(seq.begin(), seq.end(), [](const auto& e) {
    return is_marker(e, ControlMarker::EndOfSpeech);
  });
  if (tos_count != 1) {
    problems.push_back("expected one turn_of_speech, found " +
                       std::to_string(tos_count));
  }
  if (eos_count != 1 || seq.empty() ||
      !is_marker(seq.back(), ControlMarker::EndOfSpeech)) {
    problems.push_back("end_of_speech must occur exactly once, as the last element");
  }

  auto tos = std::find_if(seq.begin(), seq.end(), [](const auto& e) {
    return is_marker(e, ControlMarker::TurnOfSpeech);
  });
  for (auto it = tos; it != seq.end(); ++it) {
    if (is_marker(*it, ControlMarker::ConcatNextSemantics)) {
      problems.push_back("concat_next_semantics after turn_of_speech");
      break;
    }
    if (is_semantic(*it)) {
      problems.push_back("semantic vector after turn_of_speech");
      break;
    }
  }

  // Maximal runs before turn_of_speech.
  std::vector<std::size_t> sem_runs;
  std::vector<std::size_t> speech_runs;
  for (auto it = seq.begin(); it != tos;) {
    if (is_semantic(*it) || is_speech(*it)) {
      const bool sem = is_semantic(*it);
      std::size_t len = 0;
      while (it != tos && (sem ? is_semantic(*it) : is_speech(*it))) {
        ++len;
        ++it;
      }
      (sem ? sem_runs : speech_runs).push_back(len);
    } else {
      ++it;
    }
  }
  for (std::size_t i = 0; i < sem_runs.size(); ++i) {
    const bool last = i + 1 == sem_runs.size();
    if (last ? (sem_runs[i] < 1 || sem_runs[i] > policy.n_semantic)
             : sem_runs[i] != policy.n_semantic) {
      problems.push_back("semantic run " + std::to_string(i) + " has length " +
                         std::to_string(sem_runs[i]));
    }
  }
  for (std::size_t i = 0; i < speech_runs.size(); ++i) {
    if (speech_runs[i] != policy.n_speech) {
      problems.push_back("speech run " + std::to_string(i) +
                         " before turn_of_speech has length " +
                         std::to_string(speech_runs[i]));
    }
  }
  return problems;
}

}  // namespace dflow::interleave
