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

#include "dflow/annotate/labels.h"

#include <algorithm>
#include <cmath>

#include "dflow/core/error.h"
#include "dflow/core/types.h"

namespace dflow::annotate {

namespace {

// inner lies inside outer and outer keeps going epsilon past inner's end.
bool talked_through(const SpeechSegment& inner, const SpeechSegment& outer,
                    TimeMs epsilon_ms) {
  return seconds_to_ms(outer.start_s) < seconds_to_ms(inner.start_s) &&
         seconds_to_ms(outer.end_s) >= seconds_to_ms(inner.end_s) + epsilon_ms;
}

bool inside_other_channel(const DialogueTimeline& t, std::size_t i, TimeMs eps_ms) {
  const auto& seg = t.segments[i];
  return std::any_of(t.segments.begin(), t.segments.end(), [&](const SpeechSegment& o) {
    return o.channel != seg.channel && talked_through(seg, o, eps_ms);
  });
}

TimeMs epsilon_to_ms(double epsilon_s) {
  if (!std::isfinite(epsilon_s) || epsilon_s < 0.0) {
    throw ValidationError("back-channel epsilon must be finite and >= 0");
  }
  return seconds_to_ms(epsilon_s);
}

}  // namespace

std::vector<Interval> detect_backchannels(const DialogueTimeline& timeline,
                                          double epsilon_s) {
  const TimeMs eps_ms = epsilon_to_ms(epsilon_s);
  std::vector<Interval> out;
  for (std::size_t i = 0; i < timeline.segments.size(); ++i) {
    const auto& s = timeline.segments[i];
    if (s.channel == Channel::User && inside_other_channel(timeline, i, eps_ms)) {
      out.push_back({s.start_s, s.end_s});
    }
  }
  return out;
}

DuplexLabels annotate_timeline(const DialogueTimeline& timeline,
                               const AnnotationConfig& config) {
  require_valid(timeline);
  validate(config.gaps);
  const TimeMs eps_ms = epsilon_to_ms(config.epsilon_s);

  DuplexLabels labels;
  labels.backchannel_intervals = detect_backchannels(timeline, config.epsilon_s);

  std::vector<const SpeechSegment*> turns;
  for (std::size_t i = 0; i < timeline.segments.size(); ++i) {
    if (!inside_other_channel(timeline, i, eps_ms)) {
      turns.push_back(&timeline.segments[i]);
    }
  }

  PortableRng rng(config.seed);
  for (std::size_t i = 1; i < turns.size(); ++i) {
    const auto& prev = *turns[i - 1];
    const auto& next = *turns[i];
    if (prev.channel == Channel::User && next.channel == Channel::Assistant) {
      labels.assistant_turn_onsets.push_back(prev.end_s);
    } else if (prev.channel == Channel::Assistant && next.channel == Channel::User) {
      const double onset = prev.end_s + sample_turn_gap(config.gaps, rng);
      if (onset <= timeline.duration_s) labels.user_turn_onsets.push_back(onset);
    }
  }
  std::sort(labels.assistant_turn_onsets.begin(), labels.assistant_turn_onsets.end());
  std::sort(labels.user_turn_onsets.begin(), labels.user_turn_onsets.end());
  return labels;
}

Json labels_to_json(const DuplexLabels& labels, const AnnotationConfig& config) {
  Json bc = Json::array();
  for (const auto& iv : labels.backchannel_intervals) {
    bc.push_back(Json::array({iv.start_s, iv.end_s}));
  }
  return Json{{"assistant_turn_onsets", labels.assistant_turn_onsets},
              {"user_turn_onsets", labels.user_turn_onsets},
              {"backchannel_intervals", std::move(bc)},
              {"meta",
               {{"seed", config.seed},
                {"rng", std::string(PortableRng::kAlgorithm)},
                {"epsilon_s", config.epsilon_s},
                {"gap", gap_distribution_to_json(config.gaps)}}}};
}

DuplexLabels labels_from_json(const Json& j) {
  DuplexLabels labels;
  labels.assistant_turn_onsets = required<std::vector<double>>(j, "assistant_turn_onsets");
  labels.user_turn_onsets = required<std::vector<double>>(j, "user_turn_onsets");
  for (const auto& pair : required<std::vector<std::vector<double>>>(j, "backchannel_intervals")) {
    if (pair.size() != 2) {
      throw ValidationError("back-channel interval must be [start_s, end_s]");
    }
    labels.backchannel_intervals.push_back({pair[0], pair[1]});
  }
  auto sorted = [](const std::vector<double>& v) { return std::is_sorted(v.begin(), v.end()); };
  if (!sorted(labels.assistant_turn_onsets) || !sorted(labels.user_turn_onsets)) {
    throw ValidationError("label onsets must be sorted ascending");
  }
  return labels;
}

}  // namespace dflow::annotate
