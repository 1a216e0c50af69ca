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

#include "dflow/duplex/predictor.h"

#include <algorithm>
#include <string>

#include "dflow/core/error.h"

namespace dflow::duplex {

void validate_script(std::span<const ScriptEntry> script) {
  for (const auto& e : script) {
    if (!(e.decision.confidence >= 0.0 && e.decision.confidence <= 1.0)) {
      throw ConfigError("script confidence outside [0, 1] at chunk " +
                        std::to_string(e.chunk_index));
    }
  }
  for (std::size_t i = 1; i < script.size(); ++i) {
    if (script[i].chunk_index == script[i - 1].chunk_index) {
      throw ConfigError("duplicate script entry for chunk " +
                        std::to_string(script[i].chunk_index));
    }
    if (script[i].chunk_index < script[i - 1].chunk_index) {
      throw ConfigError("script not sorted by chunk index at entry " +
                        std::to_string(i));
    }
  }
}

DuplexDecision scripted_predictor(std::span<const ScriptEntry> script,
                                  const PredictorContext& ctx) {
  auto it = std::lower_bound(
      script.begin(), script.end(), ctx.chunk_index,
      [](const ScriptEntry& e, std::int64_t c) { return e.chunk_index < c; });
  if (it != script.end() && it->chunk_index == ctx.chunk_index) return it->decision;
  return DuplexDecision{DecisionKind::NoAction, 0.0};
}

DuplexDecision threshold_predictor(const PredictorContext& ctx,
                                   const ThresholdParams& params) {
  if (params.energy_index >= ctx.feature_vector.size()) {
    throw ConfigError("energy_index " + std::to_string(params.energy_index) +
                      " outside feature vector of width " +
                      std::to_string(ctx.feature_vector.size()));
  }
  const double value = ctx.feature_vector[params.energy_index];
  const double confidence = std::clamp(value, 0.0, 1.0);
  if (!ctx.assistant_speaking) {
    if (!ctx.user_speaking && value >= params.take_turn_threshold) {
      return {DecisionKind::TakeTurn, confidence};
    }
  } else if (ctx.user_speaking && value >= params.halt_threshold) {
    return {DecisionKind::HaltAndListen, confidence};
  }
  return {DecisionKind::NoAction, 0.0};
}

ScriptedPredictor::ScriptedPredictor(std::vector<ScriptEntry> script)
    : script_(std::move(script)) {
  validate_script(script_);
}

DuplexDecision ScriptedPredictor::decide(const PredictorContext& ctx) {
  return scripted_predictor(script_, ctx);
}

DuplexDecision ThresholdPredictor::decide(const PredictorContext& ctx) {
  return threshold_predictor(ctx, params_);
}

Json predictor_config_to_json(const PredictorConfig& c) {
  if (c.kind == PredictorConfig::Kind::Scripted) {
    Json script = Json::array();
    for (const auto& e : c.script) {
      script.push_back(Json{{"chunk", e.chunk_index},
                            {"decision", std::string(to_string(e.decision.kind))},
                            {"confidence", e.decision.confidence}});
    }
    return Json{{"kind", "scripted"}, {"script", std::move(script)}};
  }
  return Json{{"kind", "threshold"},
              {"take_turn_threshold", c.threshold.take_turn_threshold},
              {"halt_threshold", c.threshold.halt_threshold},
              {"energy_index", c.threshold.energy_index}};
}

PredictorConfig predictor_config_from_json(const Json& j) {
  PredictorConfig c;
  const auto kind = required<std::string>(j, "kind");
  if (kind == "scripted") {
    c.kind = PredictorConfig::Kind::Scripted;
    auto it = j.find("script");
    if (it != j.end()) {
      if (!it->is_array()) throw ConfigError("predictor script must be an array");
      for (const auto& e : *it) {
        c.script.push_back(ScriptEntry{
            required<std::int64_t>(e, "chunk"),
            DuplexDecision{decision_kind_from_string(required<std::string>(e, "decision")),
                           optional_or<double>(e, "confidence", 1.0)}});
      }
    }
    validate_script(c.script);
  } else if (kind == "threshold") {
    c.kind = PredictorConfig::Kind::Threshold;
    c.threshold.take_turn_threshold =
        optional_or<double>(j, "take_turn_threshold", c.threshold.take_turn_threshold);
    c.threshold.halt_threshold =
        optional_or<double>(j, "halt_threshold", c.threshold.halt_threshold);
    c.threshold.energy_index =
        optional_or<std::size_t>(j, "energy_index", c.threshold.energy_index);
  } else {
    throw ConfigError("unknown predictor kind '" + kind + "'");
  }
  return c;
}

std::unique_ptr<Predictor> make_predictor(const PredictorConfig& c) {
  if (c.kind == PredictorConfig::Kind::Scripted) {
    return std::make_unique<ScriptedPredictor>(c.script);
  }
  return std::make_unique<ThresholdPredictor>(c.threshold);
}

std::vector<double> activity_features(const UserActivity& activity, bool assistant_speaking,
                                      TimeMs now_ms, std::size_t width,
                                      double saturation_s) {
  if (width < kMinFeatureWidth) {
    throw ConfigError("predictor feature width must be >= " +
                      std::to_string(kMinFeatureWidth));
  }
  std::vector<double> f(width, 0.0);
  if (activity.segment_start_ms) {
    const TimeMs until = activity.speaking || !activity.segment_end_ms
                             ? now_ms
                             : *activity.segment_end_ms;
    const double spoken_s = std::max<TimeMs>(0, until - *activity.segment_start_ms) / 1000.0;
    f[0] = saturation_s > 0.0 ? std::min(1.0, spoken_s / saturation_s) : 1.0;
  }
  f[1] = activity.speaking ? 1.0 : 0.0;
  if (!activity.speaking && activity.segment_end_ms) {
    const double silent_s = std::max<TimeMs>(0, now_ms - *activity.segment_end_ms) / 1000.0;
    f[2] = std::min(1.0, silent_s / 2.0);
  }
  f[3] = assistant_speaking ? 1.0 : 0.0;
  return f;
}

}  // namespace dflow::duplex
