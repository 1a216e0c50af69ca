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
#include <optional>
#include <string>
#include <vector>

#include "dflow/annotate/labels.h"
#include "dflow/core/timeline.h"
#include "dflow/core/types.h"
#include "dflow/duplex/predictor.h"
#include "dflow/stagebus/wire.h"

namespace dflow::stagebus {

/// Token budget of one assistant turn.
struct ResponsePlan {
  std::uint32_t text_tokens = 20;
  std::uint32_t speech_tokens = 60;
  friend bool operator==(const ResponsePlan&, const ResponsePlan&) = default;
};

inline constexpr std::string_view kBuiltinEndpoint = "builtin";

struct StageDescriptor {
  StageRole role = StageRole::TextLlm;
  double per_unit_latency_ms = 0.0;
  double jitter_ms = 0.0;
  // "builtin", "stdio:<command line>" or "tcp:<host>:<port>".
  std::string endpoint = std::string(kBuiltinEndpoint);
  friend bool operator==(const StageDescriptor&, const StageDescriptor&) = default;
};

void validate(const StageDescriptor& d);

/// Built-in descriptors carrying the profile's per-unit latencies. Voice
/// encoder time is folded into the speech-to-text figures, so it is 0.
std::vector<StageDescriptor> default_stages(const LatencyProfile& profile);

Json stages_to_json(const std::vector<StageDescriptor>& stages);
std::vector<StageDescriptor> stages_from_json(const Json& j);

struct Scenario {
  std::string session = "s0";
  std::uint64_t seed = 0;
  DialogueTimeline timeline;
  std::vector<ResponsePlan> plans;  // per assistant turn, in order
  ResponsePlan default_plan;        // once plans run out
  duplex::PredictorConfig predictor;
  LatencyProfile profile = reference_profile();
  RatioPolicy policy;
  ChunkGrid grid;
  std::uint32_t codebook_size = 6561;
  std::uint32_t hidden_width = 8;
  std::uint32_t text_vocab = 151646;
  std::uint32_t feature_width = duplex::kMinFeatureWidth;

  const ResponsePlan& plan_for_turn(std::size_t turn) const {
    return turn < plans.size() ? plans[turn] : default_plan;
  }
};

/// Throws ValidationError / ConfigError for an inconsistent scenario.
void validate(const Scenario& s);

/// Scenario file format. The predictor may be {"kind":"oracle", "label_seed":
/// n, "gap": {...}, "epsilon_s": x}, which is resolved here into the script
/// produced by oracle_script over the annotated timeline.
Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& s);

/// TakeTurn at every labeled assistant onset chunk and HaltAndListen at every
/// labeled user onset chunk. Throws ConfigError if two onsets share a chunk.
std::vector<duplex::ScriptEntry> oracle_script(const DuplexLabels& labels,
                                               const ChunkGrid& grid);

struct RandomScenarioOptions {
  std::uint32_t exchanges_min = 2;
  std::uint32_t exchanges_max = 5;
  double backchannel_probability = 0.5;
  annotate::AnnotationConfig labels;  // seed is overwritten per scenario
};

struct GeneratedScenario {
  Scenario scenario;
  DuplexLabels labels;
  annotate::AnnotationConfig annotation;
};

/// A seeded dialogue on the chunk grid (times are whole chunks), annotated, with
/// an oracle script. Exchanges are spaced so every assistant turn produces its
/// first audio packet before the user's labeled turn-taking onset. Hidden
/// gaps are re-drawn until the oracle script is conflict free.
GeneratedScenario random_scenario(std::uint64_t seed, const RandomScenarioOptions& options = {});

}  // namespace dflow::stagebus
