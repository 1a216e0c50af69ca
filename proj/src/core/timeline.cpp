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

#include "dflow/core/timeline.h"

#include <cmath>

#include "dflow/core/error.h"

namespace dflow {

std::string_view to_string(Channel c) {
  return c == Channel::User ? "user" : "assistant";
}

Channel channel_from_string(std::string_view s) {
  if (s == "user") return Channel::User;
  if (s == "assistant") return Channel::Assistant;
  throw ValidationError("unknown channel '" + std::string(s) + "'");
}

std::string_view to_string(TimelineViolation::Kind k) {
  using K = TimelineViolation::Kind;
  switch (k) {
    case K::NonFiniteTime: return "non_finite_time";
    case K::NegativeStart: return "negative_start";
    case K::DegenerateSegment: return "degenerate_segment";
    case K::ExceedsDuration: return "exceeds_duration";
    case K::Unsorted: return "unsorted";
    case K::SameChannelOverlap: return "same_channel_overlap";
    case K::BadDuration: return "bad_duration";
  }
  return "unknown";
}

namespace {

std::string seg_name(std::size_t i) { return "segment " + std::to_string(i); }

}  // namespace

std::vector<TimelineViolation> validate_timeline(const DialogueTimeline& t) {
  using K = TimelineViolation::Kind;
  std::vector<TimelineViolation> out;
  if (!std::isfinite(t.duration_s) || t.duration_s < 0.0) {
    out.push_back({K::BadDuration, {}, "duration_s must be finite and >= 0"});
  }
  const auto& segs = t.segments;
  std::vector<bool> usable(segs.size(), true);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    if (!std::isfinite(s.start_s) || !std::isfinite(s.end_s)) {
      out.push_back({K::NonFiniteTime, {i}, seg_name(i) + " has a non-finite time"});
      usable[i] = false;
      continue;
    }
    if (s.start_s < 0.0) {
      out.push_back({K::NegativeStart, {i}, seg_name(i) + " starts before 0"});
    }
    if (!(s.start_s < s.end_s)) {
      out.push_back({K::DegenerateSegment, {i},
                     seg_name(i) + " has start_s >= end_s"});
      usable[i] = false;
    }
    if (std::isfinite(t.duration_s) && s.end_s > t.duration_s) {
      out.push_back({K::ExceedsDuration, {i},
                     seg_name(i) + " ends after duration_s"});
    }
    if (i > 0 && std::isfinite(segs[i - 1].start_s) &&
        s.start_s < segs[i - 1].start_s) {
      out.push_back({K::Unsorted, {i - 1, i},
                     seg_name(i) + " starts before " + seg_name(i - 1)});
    }
  }
  // Overlap check per channel against the latest-ending earlier segment.
  for (Channel ch : {Channel::User, Channel::Assistant}) {
    std::size_t prev = segs.size();
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (segs[i].channel != ch || !usable[i]) continue;
      if (prev != segs.size() && segs[i].start_s < segs[prev].end_s &&
          segs[i].end_s > segs[prev].start_s) {
        out.push_back({K::SameChannelOverlap, {prev, i},
                       seg_name(prev) + " and " + seg_name(i) +
                           " overlap on channel " + std::string(to_string(ch))});
      }
      if (prev == segs.size() || segs[i].end_s > segs[prev].end_s) prev = i;
    }
  }
  return out;
}

void require_valid(const DialogueTimeline& timeline) {
  auto v = validate_timeline(timeline);
  if (!v.empty()) {
    std::string msg = "invalid timeline: " + v.front().message;
    if (v.size() > 1) msg += " (+" + std::to_string(v.size() - 1) + " more)";
    throw ValidationError(msg);
  }
}

Json timeline_to_json(const DialogueTimeline& t) {
  Json segs = Json::array();
  for (const auto& s : t.segments) {
    segs.push_back(Json{{"channel", std::string(to_string(s.channel))},
                        {"start_s", s.start_s},
                        {"end_s", s.end_s}});
  }
  return Json{{"duration_s", t.duration_s}, {"segments", std::move(segs)}};
}

DialogueTimeline timeline_from_json(const Json& j) {
  DialogueTimeline t;
  t.duration_s = required<double>(j, "duration_s");
  const auto& segs = j.find("segments");
  if (segs == j.end() || !segs->is_array()) {
    throw ValidationError("timeline needs a 'segments' array");
  }
  for (const auto& s : *segs) {
    t.segments.push_back(
        SpeechSegment{channel_from_string(required<std::string>(s, "channel")),
                      required<double>(s, "start_s"), required<double>(s, "end_s")});
  }
  return t;
}

}  // namespace dflow
