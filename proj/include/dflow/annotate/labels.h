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
#include <vector>

#include "dflow/annotate/gap.h"
#include "dflow/core/timeline.h"

namespace dflow::annotate {

inline constexpr double kDefaultBackchannelEpsilonS = 0.2;

/// User segments the assistant talked through: strictly after an assistant
/// segment starts, and the assistant keeps speaking at least epsilon_s past
/// the user's end. Times are compared at millisecond resolution.
std::vector<Interval> detect_backchannels(const DialogueTimeline& timeline,
                                          double epsilon_s = kDefaultBackchannelEpsilonS);

struct AnnotationConfig {
  GapDistribution gaps;
  std::uint64_t seed = 0;
  double epsilon_s = kDefaultBackchannelEpsilonS;
};

/// Duplex labels for a validated timeline.
///
/// Back-channel user segments (and assistant segments the user talked through)
/// are set aside; over the remaining start-ordered segments, each user ->
/// assistant hand-over yields an assistant onset at the user segment's end, and
/// each assistant -> user hand-over a user onset at the assistant end plus a
/// sampled gap. One gap is drawn per hand-over in order; onsets past
/// duration_s are dropped. Throws ValidationError for an invalid timeline.
DuplexLabels annotate_timeline(const DialogueTimeline& timeline,
                               const AnnotationConfig& config);

Json labels_to_json(const DuplexLabels& labels, const AnnotationConfig& config);
DuplexLabels labels_from_json(const Json& j);

}  // namespace dflow::annotate
