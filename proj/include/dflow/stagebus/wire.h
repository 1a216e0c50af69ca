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
#include <string_view>
#include <variant>
#include <vector>

#include "dflow/core/error.h"
#include "dflow/core/types.h"
#include "dflow/duplex/predictor.h"

namespace dflow::stagebus {

inline constexpr int kProtocolVersion = 1;

enum class StageRole { VoiceEncoder, TextLlm, VoiceTokenLm, Token2Wav, DuplexPredictor };

inline constexpr StageRole kAllRoles[] = {StageRole::VoiceEncoder, StageRole::TextLlm,
                                          StageRole::VoiceTokenLm, StageRole::Token2Wav,
                                          StageRole::DuplexPredictor};

std::string_view to_string(StageRole r);
StageRole stage_role_from_string(std::string_view s);

enum class MessageType {
  Hello,
  Configure,
  TextBatch,
  SpeechBatch,
  Marker,
  PredictRequest,
  PredictResponse,
  Ack,
  Error,
};

std::string_view to_string(MessageType t);
/// Throws DecodeError(reason "unknown_type") naming the type.
MessageType message_type_from_string(std::string_view s);

struct HelloPayload {
  int protocol_version = kProtocolVersion;
  std::optional<RatioPolicy> policy;      // engine -> stage
  std::optional<LatencyProfile> profile;  // engine -> stage
  std::vector<StageRole> roles;           // stage -> engine
  friend bool operator==(const HelloPayload&, const HelloPayload&) = default;
};

struct ConfigurePayload {
  std::uint64_t seed = 0;
  std::uint32_t codebook_size = 2;
  std::uint32_t hidden_width = 1;
  std::uint32_t text_vocab = 1;
  std::uint32_t feature_width = duplex::kMinFeatureWidth;
  duplex::PredictorConfig predictor;
  friend bool operator==(const ConfigurePayload&, const ConfigurePayload&) = default;
};

/// Request: tokens/semantics empty. Response: count tokens and vectors.
struct TextBatchPayload {
  std::uint32_t turn = 0;
  std::uint32_t batch = 0;
  std::uint64_t first_index = 0;
  std::uint32_t count = 0;
  std::vector<std::uint32_t> tokens;
  std::vector<std::vector<double>> semantics;
  friend bool operator==(const TextBatchPayload&, const TextBatchPayload&) = default;
};

/// To the voice token LM with tokens empty: generate count tokens.
/// To token2wav with tokens filled: synthesize them (answered with ack).
struct SpeechBatchPayload {
  std::uint32_t turn = 0;
  std::uint32_t batch = 0;
  std::uint64_t first_index = 0;
  std::uint32_t count = 0;
  std::vector<std::uint32_t> tokens;
  bool final = false;
  friend bool operator==(const SpeechBatchPayload&, const SpeechBatchPayload&) = default;
};

struct MarkerPayload {
  std::uint32_t turn = 0;
  ControlMarker marker = ControlMarker::TurnOfSpeech;
  friend bool operator==(const MarkerPayload&, const MarkerPayload&) = default;
};

struct PredictRequestPayload {
  std::int64_t chunk = 0;
  bool user_speaking = false;
  bool assistant_speaking = false;
  std::vector<double> features;
  friend bool operator==(const PredictRequestPayload&, const PredictRequestPayload&) = default;
};

struct PredictResponsePayload {
  std::int64_t chunk = 0;
  duplex::DuplexDecision decision;
  friend bool operator==(const PredictResponsePayload&, const PredictResponsePayload&) = default;
};

struct AckPayload {
  friend bool operator==(const AckPayload&, const AckPayload&) = default;
};

struct ErrorPayload {
  std::string reason;
  std::string message;
  std::optional<std::uint64_t> echo_seq;
  friend bool operator==(const ErrorPayload&, const ErrorPayload&) = default;
};

/// Alternative order matches MessageType.
using Payload = std::variant<HelloPayload, ConfigurePayload, TextBatchPayload,
                             SpeechBatchPayload, MarkerPayload, PredictRequestPayload,
                             PredictResponsePayload, AckPayload, ErrorPayload>;

struct WireMessage {
  MessageType type = MessageType::Ack;
  std::string session;
  std::uint64_t seq = 0;
  Payload payload = AckPayload{};
  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

/// Builds a message whose type follows the payload alternative.
WireMessage make_message(std::string session, std::uint64_t seq, Payload payload);

/// A line that cannot be turned into a WireMessage. reason() is one of
/// "parse", "unknown_type", "schema".
class DecodeError : public ProtocolError {
 public:
  DecodeError(std::string reason, const std::string& what,
              std::optional<std::uint64_t> seq = std::nullopt)
      : ProtocolError(what), reason_(std::move(reason)), seq_(seq) {}
  const std::string& reason() const { return reason_; }
  /// The seq field, when the line was far enough intact to carry one.
  std::optional<std::uint64_t> seq() const { return seq_; }

 private:
  std::string reason_;
  std::optional<std::uint64_t> seq_;
};

/// One JSON object, fields in the order type, session, seq, payload, and a
/// single trailing newline. Throws EncodingError if the payload alternative does
/// not match the type or holds non-finite numbers.
std::string encode_message(const WireMessage& msg);

/// Accepts a line with or without its trailing newline.
WireMessage decode_message(std::string_view line);

Json profile_to_json(const LatencyProfile& p);
LatencyProfile profile_from_json(const Json& j);
Json policy_to_json(const RatioPolicy& p);
RatioPolicy policy_from_json(const Json& j);

}  // namespace dflow::stagebus
