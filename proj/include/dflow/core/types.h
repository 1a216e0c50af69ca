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
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dflow {

/// Virtual time in integer milliseconds.
using TimeMs = std::int64_t;

/// A discrete acoustic codebook id.
struct SpeechToken {
  std::uint32_t id = 0;

  friend bool operator==(const SpeechToken&, const SpeechToken&) = default;
};

/// Builds a token after checking id < codebook_size (codebook_size >= 2).
SpeechToken make_speech_token(std::uint64_t id, std::uint32_t codebook_size);

/// Projector output fed to the voice token LM. Width is 2 * hidden_width.
struct SemanticVector {
  std::vector<double> values;

  friend bool operator==(const SemanticVector&, const SemanticVector&) = default;
};

/// Throws ValidationError unless values.size() == 2 * hidden_width and every
/// value is finite.
void validate_semantic_vector(const SemanticVector& v, std::size_t hidden_width);

enum class ControlMarker { ConcatNextSemantics, TurnOfSpeech, EndOfSpeech };

std::string_view to_string(ControlMarker m);
ControlMarker control_marker_from_string(std::string_view s);

/// One slot of the voice decoder's interleaved input.
using InterleavedElement = std::variant<SemanticVector, SpeechToken, ControlMarker>;

inline bool is_semantic(const InterleavedElement& e) {
  return std::holds_alternative<SemanticVector>(e);
}
inline bool is_speech(const InterleavedElement& e) {
  return std::holds_alternative<SpeechToken>(e);
}
inline bool is_marker(const InterleavedElement& e, ControlMarker m) {
  const auto* p = std::get_if<ControlMarker>(&e);
  return p != nullptr && *p == m;
}

/// Short human-readable rendering, e.g. "S", "P17", "<turn_of_speech>".
std::string describe(const InterleavedElement& e);

struct RatioPolicy {
  std::uint32_t n_semantic = 5;
  std::uint32_t n_speech = 15;

  friend bool operator==(const RatioPolicy&, const RatioPolicy&) = default;
};

void validate(const RatioPolicy& p);
/// Parses "5:15".
RatioPolicy parse_ratio_policy(std::string_view text);

/// Per-stage timing parameters, all in milliseconds.
///  d_pred   one duplex predictor decision
///  prefill  fixed cost of a short first text batch (see first_text_batch_cost)
///  d_llm    one text token
///  d_lm     one speech token from the voice token LM
///  d_syn    waveform synthesis per speech token
struct LatencyProfile {
  double d_pred = 0.0;
  double prefill = 0.0;
  double d_llm = 0.0;
  double d_lm = 0.0;
  double d_syn = 0.0;

  friend bool operator==(const LatencyProfile&, const LatencyProfile&) = default;
};

void validate(const LatencyProfile& p);

/// The L20/BF16 measurements: 250 ms predictor, 30 ms per text token with a
/// 65 ms prefill for a one-token batch, 70 ms per 15 speech tokens and
/// 130 ms to synthesize them.
LatencyProfile reference_profile();

struct ChunkGrid {
  std::uint32_t chunk_ms = 100;

  friend bool operator==(const ChunkGrid&, const ChunkGrid&) = default;
};

void validate(const ChunkGrid& g);

/// Seconds -> integer milliseconds (nearest). Corpus times are quantized to
/// the millisecond on ingest.
TimeMs seconds_to_ms(double t_s);

/// floor(ms(t_s) / chunk_ms). Throws ValidationError for negative or
/// non-finite times.
std::int64_t time_to_chunk(double t_s, const ChunkGrid& grid);
std::int64_t ms_to_chunk(TimeMs t_ms, const ChunkGrid& grid);
inline TimeMs chunk_start_ms(std::int64_t chunk, const ChunkGrid& grid) {
  return chunk * static_cast<TimeMs>(grid.chunk_ms);
}

/// Round-half-up to integer milliseconds; the per-stage rounding rule.
/// Values within 1e-9 of a half-integer boundary from below are treated as
/// on the boundary so that 15 * (14/3) lands on 70.
TimeMs round_half_up_ms(double ms);

}  // namespace dflow
