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

#include <span>
#include <vector>

#include "dflow/core/types.h"

namespace dflow::interleave {

/// Teacher-forcing layout of one assistant turn.
///
/// While at least n_semantic semantics and n_speech speech tokens remain, emits
/// a group of n_semantic semantics followed by n_speech speech tokens, with a
/// ConcatNextSemantics marker in front of every group but the first. Leftover
/// semantics follow (in n_semantic groups, each later group again preceded by
/// ConcatNextSemantics, the last possibly partial), then TurnOfSpeech, every
/// remaining speech token, and a terminal EndOfSpeech.
///
/// Throws ValidationError if speech is empty.
std::vector<InterleavedElement> build_interleaved_sequence(
    std::span<const SemanticVector> semantics, std::span<const SpeechToken> speech,
    const RatioPolicy& policy);

/// Structural checks on an interleaved sequence; empty when it is well formed.
/// Used by tests and by the simulator's self-checks.
std::vector<std::string> check_sequence_invariants(
    std::span<const InterleavedElement> seq, const RatioPolicy& policy);

}  // namespace dflow::interleave
