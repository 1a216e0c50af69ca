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

#include "dflow/interleave/latency_model.h"

#include <algorithm>

namespace dflow::interleave {

double theoretical_latency(const LatencyProfile& profile, const RatioPolicy& policy) {
  validate(profile);
  validate(policy);
  return policy.n_semantic * profile.d_llm + policy.n_speech * profile.d_lm +
         policy.n_speech * profile.d_syn;
}

double experiential_latency(const LatencyProfile& profile, const RatioPolicy& policy) {
  return profile.d_pred + theoretical_latency(profile, policy);
}

double first_text_batch_cost(const LatencyProfile& profile, const RatioPolicy& policy,
                             std::uint32_t k) {
  validate(profile);
  validate(policy);
  return std::min(profile.prefill + k * profile.d_llm,
                  policy.n_semantic * profile.d_llm);
}

}  // namespace dflow::interleave
