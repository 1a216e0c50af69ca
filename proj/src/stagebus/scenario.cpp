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

#include "dflow/stagebus/scenario.h"

#include <algorithm>
#include <cmath>

#include "dflow/annotate/rng.h"
#include "dflow/core/error.h"

namespace dflow::stagebus {

namespace {

bool has_prefix(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

Json plan_to_json(const ResponsePlan& p) {
  return Json{{"text_tokens", p.text_tokens}, {"speech_tokens", p.speech_tokens}};
}

ResponsePlan plan_from_json(const Json& j) {
  ResponsePlan p;
  p.text_tokens = optional_or<std::uint32_t>(j, "text_tokens", p.text_tokens);
  p.speech_tokens = optional_or<std::uint32_t>(j, "speech_tokens", p.speech_tokens);
  return p;
}

// Inclusive integer in [lo, hi].
std::int64_t draw_int(annotate::PortableRng& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<std::int64_t>(rng.next_u64() % span);
}

double ms_to_s(TimeMs ms) { return static_cast<double>(ms) / 1000.0; }

// Onsets alternate assistant, user, assistant, ... on strictly increasing chunks.
bool alternates(const DuplexLabels& labels, const ChunkGrid& grid) {
  const auto& a = labels.assistant_turn_onsets;
  const auto& u = labels.user_turn_onsets;
  if (u.size() > a.size() || a.size() > u.size() + 1) return false;
  std::int64_t last = -1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ca = time_to_chunk(a[i], grid);
    if (ca <= last) return false;
    last = ca;
    if (i < u.size()) {
      const auto cu = time_to_chunk(u[i], grid);
      if (cu <= last) return false;
      last = cu;
    }
  }
  return true;
}

}  // namespace

void validate(const StageDescriptor& d) {
  if (!std::isfinite(d.per_unit_latency_ms) || d.per_unit_latency_ms < 0.0) {
    throw ConfigError("stage " + std::string(to_string(d.role)) +
                      ": per_unit_latency_ms must be finite and >= 0");
  }
  if (!std::isfinite(d.jitter_ms) || d.jitter_ms < 0.0) {
    throw ConfigError("stage " + std::string(to_string(d.role)) +
                      ": jitter_ms must be finite and >= 0");
  }
  if (d.endpoint != kBuiltinEndpoint && !has_prefix(d.endpoint, "stdio:") &&
      !has_prefix(d.endpoint, "tcp:")) {
    throw ConfigError("stage endpoint must be builtin, stdio:<command> or "
                      "tcp:<host>:<port>, got '" + d.endpoint + "'");
  }
}

std::vector<StageDescriptor> default_stages(const LatencyProfile& profile) {
  return {
      {StageRole::VoiceEncoder, 0.0, 0.0, std::string(kBuiltinEndpoint)},
      {StageRole::TextLlm, profile.d_llm, 0.0, std::string(kBuiltinEndpoint)},
      {StageRole::VoiceTokenLm, profile.d_lm, 0.0, std::string(kBuiltinEndpoint)},
      {StageRole::Token2Wav, profile.d_syn, 0.0, std::string(kBuiltinEndpoint)},
      {StageRole::DuplexPredictor, profile.d_pred, 0.0, std::string(kBuiltinEndpoint)},
  };
}

Json stages_to_json(const std::vector<StageDescriptor>& stages) {
  Json out = Json::array();
  for (const auto& d : stages) {
    out.push_back(Json{{"role", std::string(to_string(d.role))},
                       {"per_unit_latency_ms", d.per_unit_latency_ms},
                       {"jitter_ms", d.jitter_ms},
                       {"endpoint", d.endpoint}});
  }
  return out;
}

std::vector<StageDescriptor> stages_from_json(const Json& j) {
  if (j.is_object() && !j.contains("stages")) {
    throw ValidationError("missing object field 'stages'");
  }
  const Json& list = j.is_object() ? j.at("stages") : j;
  if (!list.is_array()) throw ValidationError("stages must be a JSON array");
  std::vector<StageDescriptor> out;
  for (const auto& item : list) {
    StageDescriptor d;
    d.role = stage_role_from_string(required<std::string>(item, "role"));
    d.per_unit_latency_ms = required<double>(item, "per_unit_latency_ms");
    d.jitter_ms = optional_or<double>(item, "jitter_ms", 0.0);
    d.endpoint = optional_or<std::string>(item, "endpoint", std::string(kBuiltinEndpoint));
    validate(d);
    out.push_back(std::move(d));
  }
  return out;
}

void validate(const Scenario& s) {
  if (s.session.empty()) throw ValidationError("scenario session id is empty");
  require_valid(s.timeline);
  validate(s.profile);
  validate(s.policy);
  validate(s.grid);
  for (const auto* p : {&s.default_plan}) {
    if (p->speech_tokens < 1) throw ValidationError("default plan needs speech_tokens >= 1");
  }
  for (std::size_t i = 0; i < s.plans.size(); ++i) {
    if (s.plans[i].speech_tokens < 1) {
      throw ValidationError("plan " + std::to_string(i) + " needs speech_tokens >= 1");
    }
  }
  if (s.codebook_size < 2) throw ValidationError("codebook_size must be >= 2");
  if (s.hidden_width < 1) throw ValidationError("hidden_width must be >= 1");
  if (s.text_vocab < 1) throw ValidationError("text_vocab must be >= 1");
  if (s.feature_width < duplex::kMinFeatureWidth) {
    throw ValidationError("feature_width must be >= " +
                          std::to_string(duplex::kMinFeatureWidth));
  }
  if (s.predictor.kind == duplex::PredictorConfig::Kind::Scripted) {
    duplex::validate_script(s.predictor.script);
    const auto last_chunk = ms_to_chunk(seconds_to_ms(s.timeline.duration_s), s.grid);
    for (const auto& e : s.predictor.script) {
      if (e.chunk_index < 0 || e.chunk_index > last_chunk) {
        throw ValidationError("script chunk " + std::to_string(e.chunk_index) +
                              " lies outside the timeline (last chunk " +
                              std::to_string(last_chunk) + ")");
      }
    }
  } else if (s.predictor.threshold.energy_index >= s.feature_width) {
    throw ConfigError("threshold energy_index is outside feature_width");
  }
}

std::vector<duplex::ScriptEntry> oracle_script(const DuplexLabels& labels,
                                               const ChunkGrid& grid) {
  std::vector<duplex::ScriptEntry> script;
  for (double t : labels.assistant_turn_onsets) {
    script.push_back({time_to_chunk(t, grid), {duplex::DecisionKind::TakeTurn, 1.0}});
  }
  for (double t : labels.user_turn_onsets) {
    script.push_back({time_to_chunk(t, grid), {duplex::DecisionKind::HaltAndListen, 1.0}});
  }
  std::sort(script.begin(), script.end(),
            [](const auto& a, const auto& b) { return a.chunk_index < b.chunk_index; });
  for (std::size_t i = 1; i < script.size(); ++i) {
    if (script[i].chunk_index == script[i - 1].chunk_index) {
      throw ConfigError("two labeled onsets fall in chunk " +
                        std::to_string(script[i].chunk_index));
    }
  }
  return script;
}

Scenario scenario_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("scenario must be a JSON object");
  Scenario s;
  s.session = optional_or<std::string>(j, "session", s.session);
  s.seed = optional_or<std::uint64_t>(j, "seed", s.seed);
  s.timeline = timeline_from_json(required_object(j, "timeline"));
  if (auto it = j.find("plans"); it != j.end()) {
    if (!it->is_array()) throw ValidationError("plans must be an array");
    for (const auto& p : *it) s.plans.push_back(plan_from_json(p));
  }
  if (auto it = j.find("default_plan"); it != j.end()) s.default_plan = plan_from_json(*it);
  if (auto it = j.find("profile"); it != j.end()) s.profile = profile_from_json(*it);
  if (auto it = j.find("policy"); it != j.end()) s.policy = policy_from_json(*it);
  if (auto it = j.find("grid"); it != j.end()) {
    s.grid.chunk_ms = optional_or<std::uint32_t>(*it, "chunk_ms", s.grid.chunk_ms);
  }
  s.codebook_size = optional_or<std::uint32_t>(j, "codebook_size", s.codebook_size);
  s.hidden_width = optional_or<std::uint32_t>(j, "hidden_width", s.hidden_width);
  s.text_vocab = optional_or<std::uint32_t>(j, "text_vocab", s.text_vocab);
  s.feature_width = optional_or<std::uint32_t>(j, "feature_width", s.feature_width);

  const Json& pred = required_object(j, "predictor");
  if (optional_or<std::string>(pred, "kind", "") == "oracle") {
    annotate::AnnotationConfig cfg;
    cfg.seed = optional_or<std::uint64_t>(pred, "label_seed", s.seed);
    if (auto it = pred.find("gap"); it != pred.end()) {
      cfg.gaps = annotate::gap_distribution_from_json(*it);
    }
    cfg.epsilon_s = optional_or<double>(pred, "epsilon_s", cfg.epsilon_s);
    validate(s.grid);
    s.predictor.kind = duplex::PredictorConfig::Kind::Scripted;
    s.predictor.script = oracle_script(annotate::annotate_timeline(s.timeline, cfg), s.grid);
  } else {
    s.predictor = duplex::predictor_config_from_json(pred);
  }
  validate(s);
  return s;
}

Json scenario_to_json(const Scenario& s) {
  Json plans = Json::array();
  for (const auto& p : s.plans) plans.push_back(plan_to_json(p));
  return Json{{"session", s.session},
              {"seed", s.seed},
              {"timeline", timeline_to_json(s.timeline)},
              {"plans", std::move(plans)},
              {"default_plan", plan_to_json(s.default_plan)},
              {"predictor", duplex::predictor_config_to_json(s.predictor)},
              {"profile", profile_to_json(s.profile)},
              {"policy", policy_to_json(s.policy)},
              {"grid", {{"chunk_ms", s.grid.chunk_ms}}},
              {"codebook_size", s.codebook_size},
              {"hidden_width", s.hidden_width},
              {"text_vocab", s.text_vocab},
              {"feature_width", s.feature_width}};
}

GeneratedScenario random_scenario(std::uint64_t seed, const RandomScenarioOptions& options) {
  if (options.exchanges_min < 1 || options.exchanges_max < options.exchanges_min) {
    throw ConfigError("random scenario needs 1 <= exchanges_min <= exchanges_max");
  }
  annotate::PortableRng rng(seed);
  GeneratedScenario out;
  out.annotation = options.labels;
  out.annotation.seed = seed;
  Scenario& s = out.scenario;
  s.seed = seed;
  s.session = "s" + std::to_string(seed);
  const TimeMs step = s.grid.chunk_ms;

  for (int attempt = 0; attempt < 1000; ++attempt) {
    s.timeline = {};
    s.plans.clear();
    const auto exchanges = draw_int(rng, options.exchanges_min, options.exchanges_max);
    TimeMs t = draw_int(rng, 1, 5) * step;
    for (std::int64_t e = 0; e < exchanges; ++e) {
      const TimeMs user_end = t + draw_int(rng, 10, 30) * step;
      s.timeline.segments.push_back({Channel::User, ms_to_s(t), ms_to_s(user_end)});
      const TimeMs a_start = user_end + draw_int(rng, 3, 10) * step;
      const TimeMs a_end = a_start + draw_int(rng, 20, 40) * step;
      s.timeline.segments.push_back({Channel::Assistant, ms_to_s(a_start), ms_to_s(a_end)});
      if (rng.uniform01() < options.backchannel_probability) {
        const TimeMs len = draw_int(rng, 2, 5) * step;
        const TimeMs latest = a_end - 3 * step - len;
        const TimeMs bc = draw_int(rng, (a_start + 5 * step) / step, latest / step) * step;
        s.timeline.segments.push_back({Channel::User, ms_to_s(bc), ms_to_s(bc + len)});
      }
      s.plans.push_back({static_cast<std::uint32_t>(draw_int(rng, 5, 40)),
                         static_cast<std::uint32_t>(draw_int(rng, 15, 200))});
      t = a_end + draw_int(rng, 3, 12) * step;
    }
    std::stable_sort(s.timeline.segments.begin(), s.timeline.segments.end(),
                     [](const auto& a, const auto& b) { return a.start_s < b.start_s; });
    s.timeline.duration_s = 0.0;
    for (const auto& seg : s.timeline.segments) {
      s.timeline.duration_s = std::max(s.timeline.duration_s, seg.end_s + ms_to_s(20 * step));
    }

    out.labels = annotate::annotate_timeline(s.timeline, out.annotation);
    if (!alternates(out.labels, s.grid)) continue;
    s.predictor.kind = duplex::PredictorConfig::Kind::Scripted;
    s.predictor.script = oracle_script(out.labels, s.grid);
    validate(s);
    return out;
  }
  throw ConfigError("could not draw a well-formed random scenario for seed " +
                    std::to_string(seed));
}

}  // namespace dflow::stagebus
