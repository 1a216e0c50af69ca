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

#include "dflow/annotate/gap.h"

#include <algorithm>
#include <cmath>

#include "dflow/core/error.h"

namespace dflow::annotate {

void validate(const GapDistribution& g) {
  if (!std::isfinite(g.mean_s) || !std::isfinite(g.std_s) ||
      !std::isfinite(g.clamp_min_s)) {
    throw ValidationError("gap distribution parameters must be finite");
  }
  if (g.std_s < 0.0) throw ValidationError("gap std_s must be >= 0");
  if (g.clamp_min_s < 0.0) throw ValidationError("gap clamp_min_s must be >= 0");
}

double sample_unclamped_gap(const GapDistribution& gaps, PortableRng& rng) {
  validate(gaps);
  if (gaps.std_s == 0.0) return gaps.mean_s;
  return rng.normal(gaps.mean_s, gaps.std_s);
}

double sample_turn_gap(const GapDistribution& gaps, PortableRng& rng) {
  return std::max(gaps.clamp_min_s, sample_unclamped_gap(gaps, rng));
}

Json gap_distribution_to_json(const GapDistribution& g) {
  return Json{{"mean_s", g.mean_s}, {"std_s", g.std_s}, {"clamp_min_s", g.clamp_min_s}};
}

GapDistribution gap_distribution_from_json(const Json& j) {
  GapDistribution g;
  g.mean_s = optional_or<double>(j, "mean_s", g.mean_s);
  g.std_s = optional_or<double>(j, "std_s", g.std_s);
  g.clamp_min_s = optional_or<double>(j, "clamp_min_s", g.clamp_min_s);
  validate(g);
  return g;
}

}  // namespace dflow::annotate
