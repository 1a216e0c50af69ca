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
#include <queue>
#include <utility>
#include <vector>

#include "dflow/core/error.h"
#include "dflow/core/types.h"

namespace dflow::stagebus {

/// Discrete-event clock. Events pop in (time, insertion order); time never
/// moves backwards.
template <typename Event>
class VirtualClock {
 public:
  struct Scheduled {
    TimeMs time;
    std::uint64_t seq;
    Event event;
  };

  TimeMs now() const { return now_ms_; }
  bool empty() const { return queue_.empty(); }
  std::size_t pending() const { return queue_.size(); }

  /// Throws ValidationError when asked to schedule in the past.
  void schedule(TimeMs at, Event event) {
    if (at < now_ms_) {
      throw ValidationError("cannot schedule an event in the past");
    }
    queue_.push(Scheduled{at, next_seq_++, std::move(event)});
  }

  std::optional<TimeMs> next_time() const {
    if (queue_.empty()) return std::nullopt;
    return queue_.top().time;
  }

  /// Removes the earliest event and advances now() to its time.
  Scheduled pop() {
    Scheduled s = std::move(const_cast<Scheduled&>(queue_.top()));
    queue_.pop();
    now_ms_ = s.time;
    return s;
  }

  /// Moves now() forward without an event (wall-clock driven operation).
  void advance_to(TimeMs t) {
    if (t > now_ms_) now_ms_ = t;
  }

  void clear() {
    while (!queue_.empty()) queue_.pop();
  }

 private:
  struct Later {
    bool operator()(const Scheduled& a, const Scheduled& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  TimeMs now_ms_ = 0;
  std::uint64_t next_seq_ = 0;
  std::priority_queue<Scheduled, std::vector<Scheduled>, Later> queue_;
};

}  // namespace dflow::stagebus
