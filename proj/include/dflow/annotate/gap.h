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

#include "dflow/annotate/rng.h"
#include "dflow/core/json_util.h"

namespace dflow::annotate {

/// Gap between the end of an assistant turn and the labeled start of the
/// user's turn, T ~ N(mean_s, std_s^2), clamped below at clamp_min_s.
struct GapDistribution {
  double mean_s = 0.6;
  double std_s = 0.4;
  double clamp_min_s = 0.0;

  friend bool operator==(const GapDistribution&, const GapDistribution&) = default;
};

void validate(const GapDistribution& g);

/// One unclamped draw from N(mean_s, std_s^2).
double sample_unclamped_gap(const GapDistribution& gaps, PortableRng& rng);

/// max(clamp_min_s, N(mean_s, std_s^2)).
double sample_turn_gap(const GapDistribution& gaps, PortableRng& rng);

Json gap_distribution_to_json(const GapDistribution& g);
GapDistribution gap_distribution_from_json(const Json& j);

}  // namespace dflow::annotate
