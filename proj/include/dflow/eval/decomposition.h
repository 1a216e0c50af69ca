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

#include <string>
#include <vector>

#include "dflow/core/json_util.h"
#include "dflow/core/types.h"

namespace dflow::eval {

struct DecompositionRow {
  std::string stage;
  TimeMs ms = 0;
};

/// First-audio latency split by stage, each rounded half-up to whole ms.
struct DecompositionReport {
  std::vector<DecompositionRow> rows;  // predictor, speech-to-text, speech token, token2wav
  TimeMs total_ms = 0;                 // sum of the rows
  TimeMs single_token_speech_to_text_ms = 0;  // first batch of one text token
};

/// Rows: d_pred; n_semantic * d_llm; n_speech * d_lm; n_speech * d_syn. The
/// prefill constant only shows in the one-token speech-to-text figure.
DecompositionReport latency_decomposition_report(const LatencyProfile& profile,
                                                 const RatioPolicy& policy);

/// "250 + 150 + 70 + 130 = 600 ms".
std::string decomposition_equation(const DecompositionReport& r);

/// Aligned two-column table followed by the equation line.
std::string format_decomposition_table(const DecompositionReport& r);

Json decomposition_to_json(const DecompositionReport& r);

}  // namespace dflow::eval
