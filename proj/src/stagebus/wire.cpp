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

#include "dflow/stagebus/wire.h"

#include <cmath>

namespace dflow::stagebus {

namespace {

constexpr std::string_view kTypeNames[] = {
    "hello", "configure", "text_batch", "speech_batch", "marker",
    "predict_request", "predict_response", "ack", "error"};

constexpr std::string_view kRoleNames[] = {"voice_encoder", "text_llm", "voice_token_lm",
                                           "token2wav", "duplex_predictor"};

void require_finite(double v, std::string_view field) {
  if (!std::isfinite(v)) {
    throw EncodingError("non-finite value in field '" + std::string(field) + "'");
  }
}

Json encode_payload(const HelloPayload& p) {
  Json j;
  j["protocol_version"] = p.protocol_version;
  if (p.policy) j["policy"] = policy_to_json(*p.policy);
  if (p.profile) {
    for (double v : {p.profile->d_pred, p.profile->prefill, p.profile->d_llm,
                     p.profile->d_lm, p.profile->d_syn}) {
      require_finite(v, "profile");
    }
    j["profile"] = profile_to_json(*p.profile);
  }
  if (!p.roles.empty()) {
    Json roles = Json::array();
    for (auto r : p.roles) roles.push_back(std::string(to_string(r)));
    j["roles"] = std::move(roles);
  }
  return j;
}

Json encode_payload(const ConfigurePayload& p) {
  return Json{{"seed", p.seed},
              {"codebook_size", p.codebook_size},
              {"hidden_width", p.hidden_width},
              {"text_vocab", p.text_vocab},
              {"feature_width", p.feature_width},
              {"predictor", duplex::predictor_config_to_json(p.predictor)}};
}

Json encode_payload(const TextBatchPayload& p) {
  for (const auto& v : p.semantics) {
    for (double x : v) require_finite(x, "semantics");
  }
  return Json{{"turn", p.turn},     {"batch", p.batch},   {"first_index", p.first_index},
              {"count", p.count},   {"tokens", p.tokens}, {"semantics", p.semantics}};
}

Json encode_payload(const SpeechBatchPayload& p) {
  return Json{{"turn", p.turn},   {"batch", p.batch},   {"first_index", p.first_index},
              {"count", p.count}, {"tokens", p.tokens}, {"final", p.final}};
}

Json encode_payload(const MarkerPayload& p) {
  return Json{{"turn", p.turn}, {"marker", std::string(to_string(p.marker))}};
}

Json encode_payload(const PredictRequestPayload& p) {
  for (double x : p.features) require_finite(x, "features");
  return Json{{"chunk", p.chunk},
              {"user_speaking", p.user_speaking},
              {"assistant_speaking", p.assistant_speaking},
              {"features", p.features}};
}

Json encode_payload(const PredictResponsePayload& p) {
  require_finite(p.decision.confidence, "confidence");
  return Json{{"chunk", p.chunk},
              {"decision", std::string(duplex::to_string(p.decision.kind))},
              {"confidence", p.decision.confidence}};
}

Json encode_payload(const AckPayload&) { return Json::object(); }

Json encode_payload(const ErrorPayload& p) {
  Json j{{"reason", p.reason}, {"message", p.message}};
  if (p.echo_seq) j["echo_seq"] = *p.echo_seq;
  return j;
}

Payload decode_payload(MessageType type, const Json& j) {
  switch (type) {
    case MessageType::Hello: {
      HelloPayload p;
      p.protocol_version = required<int>(j, "protocol_version");
      if (j.contains("policy")) p.policy = policy_from_json(j.at("policy"));
      if (j.contains("profile")) p.profile = profile_from_json(j.at("profile"));
      for (const auto& r : optional_or<std::vector<std::string>>(j, "roles", {})) {
        p.roles.push_back(stage_role_from_string(r));
      }
      return p;
    }
    case MessageType::Configure: {
      ConfigurePayload p;
      p.seed = required<std::uint64_t>(j, "seed");
      p.codebook_size = required<std::uint32_t>(j, "codebook_size");
      p.hidden_width = required<std::uint32_t>(j, "hidden_width");
      p.text_vocab = required<std::uint32_t>(j, "text_vocab");
      p.feature_width = required<std::uint32_t>(j, "feature_width");
      p.predictor = duplex::predictor_config_from_json(required_object(j, "predictor"));
      return p;
    }
    case MessageType::TextBatch: {
      TextBatchPayload p;
      p.turn = required<std::uint32_t>(j, "turn");
      p.batch = required<std::uint32_t>(j, "batch");
      p.first_index = required<std::uint64_t>(j, "first_index");
      p.count = required<std::uint32_t>(j, "count");
      p.tokens = required<std::vector<std::uint32_t>>(j, "tokens");
      p.semantics = required<std::vector<std::vector<double>>>(j, "semantics");
      return p;
    }
    case MessageType::SpeechBatch: {
      SpeechBatchPayload p;
      p.turn = required<std::uint32_t>(j, "turn");
      p.batch = required<std::uint32_t>(j, "batch");
      p.first_index = required<std::uint64_t>(j, "first_index");
      p.count = required<std::uint32_t>(j, "count");
      p.tokens = required<std::vector<std::uint32_t>>(j, "tokens");
      p.final = required<bool>(j, "final");
      return p;
    }
    case MessageType::Marker:
      return MarkerPayload{required<std::uint32_t>(j, "turn"),
                           control_marker_from_string(required<std::string>(j, "marker"))};
    case MessageType::PredictRequest: {
      PredictRequestPayload p;
      p.chunk = required<std::int64_t>(j, "chunk");
      p.user_speaking = required<bool>(j, "user_speaking");
      p.assistant_speaking = required<bool>(j, "assistant_speaking");
      p.features = required<std::vector<double>>(j, "features");
      return p;
    }
    case MessageType::PredictResponse:
      return PredictResponsePayload{
          required<std::int64_t>(j, "chunk"),
          duplex::DuplexDecision{
              duplex::decision_kind_from_string(required<std::string>(j, "decision")),
              required<double>(j, "confidence")}};
    case MessageType::Ack:
      if (!j.is_object() || !j.empty()) throw ValidationError("ack payload must be {}");
      return AckPayload{};
    case MessageType::Error: {
      ErrorPayload p;
      p.reason = required<std::string>(j, "reason");
      p.message = optional_or<std::string>(j, "message", "");
      if (j.contains("echo_seq")) p.echo_seq = required<std::uint64_t>(j, "echo_seq");
      return p;
    }
  }
  throw ValidationError("unhandled message type");
}

}  // namespace

std::string_view to_string(StageRole r) { return kRoleNames[static_cast<int>(r)]; }

StageRole stage_role_from_string(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kRoleNames); ++i) {
    if (kRoleNames[i] == s) return static_cast<StageRole>(i);
  }
  throw ValidationError("unknown stage role '" + std::string(s) + "'");
}

std::string_view to_string(MessageType t) { return kTypeNames[static_cast<int>(t)]; }

MessageType message_type_from_string(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kTypeNames); ++i) {
    if (kTypeNames[i] == s) return static_cast<MessageType>(i);
  }
  throw DecodeError("unknown_type", "unknown message type '" + std::string(s) + "'");
}

WireMessage make_message(std::string session, std::uint64_t seq, Payload payload) {
  WireMessage m;
  m.type = static_cast<MessageType>(payload.index());
  m.session = std::move(session);
  m.seq = seq;
  m.payload = std::move(payload);
  return m;
}

std::string encode_message(const WireMessage& msg) {
  if (msg.payload.index() != static_cast<std::size_t>(msg.type)) {
    throw EncodingError("payload does not match message type '" +
                        std::string(to_string(msg.type)) + "'");
  }
  Json j;
  j["type"] = std::string(to_string(msg.type));
  j["session"] = msg.session;
  j["seq"] = msg.seq;
  j["payload"] = std::visit([](const auto& p) { return encode_payload(p); }, msg.payload);
  return j.dump() + "\n";
}

WireMessage decode_message(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  Json j;
  try {
    j = Json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DecodeError("parse", std::string("malformed JSON line: ") + e.what());
  }
  if (!j.is_object()) throw DecodeError("parse", "wire message must be a JSON object");

  std::optional<std::uint64_t> seq;
  if (auto it = j.find("seq"); it != j.end() && it->is_number_unsigned()) {
    seq = it->get<std::uint64_t>();
  }
  auto type_it = j.find("type");
  if (type_it == j.end() || !type_it->is_string()) {
    throw DecodeError("schema", "wire message lacks a string 'type'", seq);
  }
  WireMessage m;
  try {
    m.type = message_type_from_string(type_it->get<std::string>());
  } catch (const DecodeError& e) {
    throw DecodeError(e.reason(), e.what(), seq);
  }
  try {
    m.session = required<std::string>(j, "session");
    m.seq = required<std::uint64_t>(j, "seq");
    auto p = j.find("payload");
    m.payload = decode_payload(m.type, p == j.end() ? Json::object() : *p);
  } catch (const DecodeError&) {
    throw;
  } catch (const Error& e) {
    throw DecodeError("schema", e.what(), seq);
  }
  return m;
}

Json profile_to_json(const LatencyProfile& p) {
  return Json{{"d_pred", p.d_pred},
              {"prefill", p.prefill},
              {"d_llm", p.d_llm},
              {"d_lm", p.d_lm},
              {"d_syn", p.d_syn}};
}

namespace {

// A number, or a "numerator/denominator" string so thirds stay exact.
double milliseconds_field(const Json& j, std::string_view key) {
  if (!j.is_object()) throw ValidationError("latency profile must be a JSON object");
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return 0.0;
  if (it->is_number()) return it->get<double>();
  if (it->is_string()) {
    const auto text = it->get<std::string>();
    const auto slash = text.find('/');
    try {
      std::size_t used = 0;
      if (slash == std::string::npos) {
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
      } else {
        const std::string num = text.substr(0, slash);
        const std::string den = text.substr(slash + 1);
        std::size_t used_den = 0;
        const double a = std::stod(num, &used);
        const double b = std::stod(den, &used_den);
        if (used == num.size() && used_den == den.size() && b != 0.0) return a / b;
      }
    } catch (const std::exception&) {
    }
  }
  throw ValidationError("field '" + std::string(key) +
                        "' must be a number or a \"a/b\" fraction string");
}

}  // namespace

LatencyProfile profile_from_json(const Json& j) {
  LatencyProfile p;
  p.d_pred = milliseconds_field(j, "d_pred");
  p.prefill = milliseconds_field(j, "prefill");
  p.d_llm = milliseconds_field(j, "d_llm");
  p.d_lm = milliseconds_field(j, "d_lm");
  p.d_syn = milliseconds_field(j, "d_syn");
  validate(p);
  return p;
}

Json policy_to_json(const RatioPolicy& p) {
  return Json{{"n_semantic", p.n_semantic}, {"n_speech", p.n_speech}};
}

RatioPolicy policy_from_json(const Json& j) {
  RatioPolicy p;
  p.n_semantic = optional_or<std::uint32_t>(j, "n_semantic", p.n_semantic);
  p.n_speech = optional_or<std::uint32_t>(j, "n_speech", p.n_speech);
  validate(p);
  return p;
}

}  // namespace dflow::stagebus
