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

#include "dflow/core/types.h"

namespace dflow::interleave {

/// Voice decoder latency to the first audio packet:
/// n_semantic * d_llm + n_speech * d_lm + n_speech * d_syn.
double theoretical_latency(const LatencyProfile& profile, const RatioPolicy& policy);

/// Predictor decision delay plus theoretical_latency.
double experiential_latency(const LatencyProfile& profile, const RatioPolicy& policy);

/// Cost of the first text batch of a turn holding k tokens. A full batch costs
/// k * d_llm; a short one pays the prefill, capped at the full-batch cost:
/// min(prefill + k * d_llm, n_semantic * d_llm). Later batches cost k * d_llm.
double first_text_batch_cost(const LatencyProfile& profile, const RatioPolicy& policy,
                             std::uint32_t k);

}  // namespace dflow::interleave
