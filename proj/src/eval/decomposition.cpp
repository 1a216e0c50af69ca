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

#include "dflow/eval/decomposition.h"

#include <algorithm>
#include <sstream>

#include "dflow/interleave/latency_model.h"

namespace dflow::eval {

DecompositionReport latency_decomposition_report(const LatencyProfile& profile,
                                                 const RatioPolicy& policy) {
  validate(profile);
  validate(policy);
  const double n_sem = policy.n_semantic;
  const double n_sp = policy.n_speech;
  DecompositionReport r;
  r.rows = {
      {"Full-duplex predictor", round_half_up_ms(profile.d_pred)},
      {"Speech-to-text", round_half_up_ms(n_sem * profile.d_llm)},
      {"Text-to-speech token", round_half_up_ms(n_sp * profile.d_lm)},
      {"Token2Wav", round_half_up_ms(n_sp * profile.d_syn)},
  };
  for (const auto& row : r.rows) r.total_ms += row.ms;
  r.single_token_speech_to_text_ms =
      round_half_up_ms(interleave::first_text_batch_cost(profile, policy, 1));
  return r;
}

std::string decomposition_equation(const DecompositionReport& r) {
  std::ostringstream os;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (i) os << " + ";
    os << r.rows[i].ms;
  }
  os << " = " << r.total_ms << " ms";
  return os.str();
}

std::string format_decomposition_table(const DecompositionReport& r) {
  std::size_t width = std::string("Total").size();
  for (const auto& row : r.rows) width = std::max(width, row.stage.size());
  std::ostringstream os;
  auto line = [&](const std::string& name, TimeMs ms) {
    os << name << std::string(width - name.size() + 2, ' ') << ms << " ms\n";
  };
  for (const auto& row : r.rows) line(row.stage, row.ms);
  line("Total", r.total_ms);
  os << "Speech-to-text with a 1-token first batch: " << r.single_token_speech_to_text_ms
     << " ms\n";
  os << decomposition_equation(r) << "\n";
  return os.str();
}

Json decomposition_to_json(const DecompositionReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(Json{{"stage", row.stage}, {"ms", row.ms}});
  return Json{{"rows", std::move(rows)},
              {"total_ms", r.total_ms},
              {"single_token_speech_to_text_ms", r.single_token_speech_to_text_ms},
              {"equation", decomposition_equation(r)}};
}

}  // namespace dflow::eval
