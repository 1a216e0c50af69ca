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

#include "dflow/core/types.h"

#include <charconv>
#include <cmath>
#include <string>

#include "dflow/core/error.h"

namespace dflow {

SpeechToken make_speech_token(std::uint64_t id, std::uint32_t codebook_size) {
  if (codebook_size < 2) {
    throw ValidationError("codebook size must be >= 2, got " +
                          std::to_string(codebook_size));
  }
  if (id >= codebook_size) {
    throw ValidationError("speech token id " + std::to_string(id) +
                          " outside codebook of size " +
                          std::to_string(codebook_size));
  }
  return SpeechToken{static_cast<std::uint32_t>(id)};
}

void validate_semantic_vector(const SemanticVector& v, std::size_t hidden_width) {
  if (v.values.size() != 2 * hidden_width) {
    throw ValidationError("semantic vector has width " +
                          std::to_string(v.values.size()) + ", expected " +
                          std::to_string(2 * hidden_width));
  }
  for (double x : v.values) {
    if (!std::isfinite(x)) {
      throw ValidationError("semantic vector contains a non-finite value");
    }
  }
}

std::string_view to_string(ControlMarker m) {
  switch (m) {
    case ControlMarker::ConcatNextSemantics:
      return "concat_next_semantics";
    case ControlMarker::TurnOfSpeech:
      return "turn_of_speech";
    case ControlMarker::EndOfSpeech:
      return "end_of_speech";
  }
  return "unknown";
}

ControlMarker control_marker_from_string(std::string_view s) {
  if (s == "concat_next_semantics") return ControlMarker::ConcatNextSemantics;
  if (s == "turn_of_speech") return ControlMarker::TurnOfSpeech;
  if (s == "end_of_speech") return ControlMarker::EndOfSpeech;
  throw ValidationError("unknown control marker '" + std::string(s) + "'");
}

std::string describe(const InterleavedElement& e) {
  if (const auto* t = std::get_if<SpeechToken>(&e)) {
    return "P" + std::to_string(t->id);
  }
  if (const auto* m = std::get_if<ControlMarker>(&e)) {
    return "<" + std::string(to_string(*m)) + ">";
  }
  return "S";
}

void validate(const RatioPolicy& p) {
  if (p.n_semantic < 1 || p.n_speech < 1) {
    throw ValidationError("ratio policy counts must be >= 1, got " +
                          std::to_string(p.n_semantic) + ":" +
                          std::to_string(p.n_speech));
  }
}

RatioPolicy parse_ratio_policy(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("ratio policy must look like 5:15, got '" +
                          std::string(text) + "'");
  }
  auto parse_part = [&](std::string_view part) {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size()) {
      throw ValidationError("bad ratio policy component '" + std::string(part) +
                            "'");
    }
    return v;
  };
  RatioPolicy p{parse_part(text.substr(0, colon)),
                parse_part(text.substr(colon + 1))};
  validate(p);
  return p;
}

void validate(const LatencyProfile& p) {
  const std::pair<const char*, double> fields[] = {
      {"d_pred", p.d_pred}, {"prefill", p.prefill}, {"d_llm", p.d_llm},
      {"d_lm", p.d_lm},     {"d_syn", p.d_syn}};
  for (const auto& [name, v] : fields) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError(std::string("latency profile field ") + name +
                            " must be finite and >= 0");
    }
  }
}

LatencyProfile reference_profile() {
  return LatencyProfile{.d_pred = 250.0,
                        .prefill = 65.0,
                        .d_llm = 30.0,
                        .d_lm = 70.0 / 15.0,
                        .d_syn = 130.0 / 15.0};
}

void validate(const ChunkGrid& g) {
  if (g.chunk_ms < 1) throw ValidationError("chunk_ms must be >= 1");
}

TimeMs seconds_to_ms(double t_s) {
  if (!std::isfinite(t_s)) throw ValidationError("time is not finite");
  return static_cast<TimeMs>(std::llround(t_s * 1000.0));
}

std::int64_t ms_to_chunk(TimeMs t_ms, const ChunkGrid& grid) {
  validate(grid);
  if (t_ms < 0) {
    throw ValidationError("negative time " + std::to_string(t_ms) + " ms");
  }
  return t_ms / static_cast<TimeMs>(grid.chunk_ms);
}

std::int64_t time_to_chunk(double t_s, const ChunkGrid& grid) {
  if (!std::isfinite(t_s) || t_s < 0.0) {
    throw ValidationError("time must be finite and >= 0");
  }
  return ms_to_chunk(seconds_to_ms(t_s), grid);
}

TimeMs round_half_up_ms(double ms) {
  return static_cast<TimeMs>(std::floor(ms + 0.5 + 1e-9));
}

}  // namespace dflow
