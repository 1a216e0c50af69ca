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
#include <vector>

#include "dflow/core/timeline.h"
#include "dflow/core/types.h"

namespace dflow::eval {

/// Inclusive chunk range.
struct ChunkRange {
  std::int64_t first = 0;
  std::int64_t last = 0;
  friend bool operator==(const ChunkRange&, const ChunkRange&) = default;
};

/// Chunks holding each interval's start and end instants.
std::vector<ChunkRange> to_chunk_ranges(std::span<const Interval> intervals,
                                        const ChunkGrid& grid);

/// Share of intervals that contain no halt. Throws UndefinedMetricError when
/// there are no intervals and ValidationError unless the ranges are sorted and
/// disjoint.
double backchannel_accuracy(std::span<const std::int64_t> halt_chunks,
                            std::span<const ChunkRange> intervals);

}  // namespace dflow::eval
