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

#include "dflow/eval/backchannel.h"

#include <algorithm>

#include "dflow/core/error.h"

namespace dflow::eval {

std::vector<ChunkRange> to_chunk_ranges(std::span<const Interval> intervals,
                                        const ChunkGrid& grid) {
  std::vector<ChunkRange> out;
  out.reserve(intervals.size());
  for (const auto& iv : intervals) {
    out.push_back({time_to_chunk(iv.start_s, grid), time_to_chunk(iv.end_s, grid)});
  }
  return out;
}

double backchannel_accuracy(std::span<const std::int64_t> halt_chunks,
                            std::span<const ChunkRange> intervals) {
  if (intervals.empty()) {
    throw UndefinedMetricError("back-channel accuracy is undefined without intervals");
  }
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (intervals[i].last < intervals[i].first) {
      throw ValidationError("back-channel range ends before it starts");
    }
    if (i > 0 && intervals[i].first <= intervals[i - 1].last) {
      throw ValidationError("back-channel ranges must be sorted and disjoint");
    }
  }
  std::size_t kept = 0;
  for (const auto& r : intervals) {
    const bool halted = std::any_of(halt_chunks.begin(), halt_chunks.end(), [&](auto c) {
      return c >= r.first && c <= r.last;
    });
    if (!halted) ++kept;
  }
  return static_cast<double>(kept) / static_cast<double>(intervals.size());
}

}  // namespace dflow::eval
