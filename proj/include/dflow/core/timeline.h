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

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dflow/core/json_util.h"

namespace dflow {

enum class Channel { User, Assistant };

std::string_view to_string(Channel c);
Channel channel_from_string(std::string_view s);

struct SpeechSegment {
  Channel channel = Channel::User;
  double start_s = 0.0;
  double end_s = 0.0;

  double duration_s() const { return end_s - start_s; }

  friend bool operator==(const SpeechSegment&, const SpeechSegment&) = default;
};

/// Two-channel timed speech. Segments are ordered by start_s.
struct DialogueTimeline {
  std::vector<SpeechSegment> segments;
  double duration_s = 0.0;

  friend bool operator==(const DialogueTimeline&, const DialogueTimeline&) = default;
};

struct TimelineViolation {
  enum class Kind {
    NonFiniteTime,
    NegativeStart,
    DegenerateSegment,
    ExceedsDuration,
    Unsorted,
    SameChannelOverlap,
    BadDuration,
  };
  Kind kind;
  std::vector<std::size_t> segments;
  std::string message;
};

std::string_view to_string(TimelineViolation::Kind k);

/// Empty iff every timeline invariant holds.
std::vector<TimelineViolation> validate_timeline(const DialogueTimeline& timeline);

/// Throws ValidationError carrying the first violation.
void require_valid(const DialogueTimeline& timeline);

struct Interval {
  double start_s = 0.0;
  double end_s = 0.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Turn-taking and back-channel labels derived from a timeline.
struct DuplexLabels {
  std::vector<double> assistant_turn_onsets;
  std::vector<double> user_turn_onsets;
  std::vector<Interval> backchannel_intervals;

  friend bool operator==(const DuplexLabels&, const DuplexLabels&) = default;
};

Json timeline_to_json(const DialogueTimeline& t);
/// Parses the timeline file format. Does not validate invariants.
DialogueTimeline timeline_from_json(const Json& j);

}  // namespace dflow
