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
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dflow/core/json_util.h"
#include "dflow/duplex/session.h"

namespace dflow::duplex {

struct ScriptEntry {
  std::int64_t chunk_index = 0;
  DuplexDecision decision;

  friend bool operator==(const ScriptEntry&, const ScriptEntry&) = default;
};

/// Throws ConfigError unless entries are sorted by chunk_index with no repeats.
void validate_script(std::span<const ScriptEntry> script);

/// The scripted decision at ctx.chunk_index, else NoAction with confidence 0.
/// The script must satisfy validate_script.
DuplexDecision scripted_predictor(std::span<const ScriptEntry> script,
                                  const PredictorContext& ctx);

struct ThresholdParams {
  double take_turn_threshold = 0.6;
  double halt_threshold = 0.6;
  std::size_t energy_index = 0;

  friend bool operator==(const ThresholdParams&, const ThresholdParams&) = default;
};

/// Listen context (assistant not speaking): TakeTurn iff the user is silent and
/// feature[energy_index] >= take_turn_threshold. Speak context: HaltAndListen
/// iff the user is speaking and feature[energy_index] >= halt_threshold.
/// Confidence is the compared feature clamped to [0, 1].
/// Throws ConfigError if energy_index is outside the feature vector.
DuplexDecision threshold_predictor(const PredictorContext& ctx,
                                   const ThresholdParams& params);

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual DuplexDecision decide(const PredictorContext& ctx) = 0;
};

class ScriptedPredictor final : public Predictor {
 public:
  explicit ScriptedPredictor(std::vector<ScriptEntry> script);
  DuplexDecision decide(const PredictorContext& ctx) override;
  const std::vector<ScriptEntry>& script() const { return script_; }

 private:
  std::vector<ScriptEntry> script_;
};

class ThresholdPredictor final : public Predictor {
 public:
  explicit ThresholdPredictor(ThresholdParams params) : params_(params) {}
  DuplexDecision decide(const PredictorContext& ctx) override;

 private:
  ThresholdParams params_;
};

/// Predictor configuration as carried in scenario files and the stage
/// protocol's configure message.
struct PredictorConfig {
  enum class Kind { Scripted, Threshold };
  Kind kind = Kind::Threshold;
  std::vector<ScriptEntry> script;
  ThresholdParams threshold;

  friend bool operator==(const PredictorConfig&, const PredictorConfig&) = default;
};

Json predictor_config_to_json(const PredictorConfig& c);
PredictorConfig predictor_config_from_json(const Json& j);
std::unique_ptr<Predictor> make_predictor(const PredictorConfig& c);

/// Built-in stand-in for the LLM hidden state fed to the predictor.
///  [0] speech evidence: seconds spoken in the current or latest user segment
///      divided by saturation_s, capped at 1
///  [1] 1 if the user is speaking
///  [2] silence since the latest user segment ended over 2 s, capped at 1
///  [3] 1 if the assistant is speaking
/// Remaining entries up to width are 0.
struct UserActivity {
  bool speaking = false;
  std::optional<TimeMs> segment_start_ms;  // current or latest user segment
  std::optional<TimeMs> segment_end_ms;    // unset while speaking
};

inline constexpr std::size_t kMinFeatureWidth = 4;

std::vector<double> activity_features(const UserActivity& activity, bool assistant_speaking,
                                      TimeMs now_ms, std::size_t width,
                                      double saturation_s = 1.0);

}  // namespace dflow::duplex
