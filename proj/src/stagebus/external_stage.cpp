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

#include "dflow/stagebus/external_stage.h"

#include <algorithm>

#include "dflow/core/error.h"

namespace dflow::stagebus {

ExternalStage::ExternalStage(std::unique_ptr<LineChannel> channel, std::string session,
                             std::chrono::milliseconds timeout)
    : channel_(std::move(channel)), session_(std::move(session)), timeout_(timeout) {}

WireMessage ExternalStage::request(Payload payload, MessageType expected) {
  const auto seq = next_seq_++;
  channel_->send_line(encode_message(make_message(session_, seq, std::move(payload))));
  auto line = channel_->receive_line(timeout_);
  if (!line) {
    throw StageError("stage timed out after " + std::to_string(timeout_.count()) +
                     " ms waiting for a reply to seq " + std::to_string(seq));
  }
  WireMessage reply = decode_message(*line);
  if (reply.session != session_) {
    throw ProtocolError("reply for session '" + reply.session + "', expected '" + session_ +
                        "'");
  }
  if (last_reply_seq_ && reply.seq <= *last_reply_seq_) {
    throw ProtocolError("reply seq " + std::to_string(reply.seq) +
                        " does not increase past " + std::to_string(*last_reply_seq_));
  }
  last_reply_seq_ = reply.seq;
  if (const auto* err = std::get_if<ErrorPayload>(&reply.payload)) {
    throw ProtocolError("stage replied error '" + err->reason + "': " + err->message);
  }
  if (reply.type != expected) {
    throw ProtocolError("expected " + std::string(to_string(expected)) + " reply, got " +
                        std::string(to_string(reply.type)));
  }
  return reply;
}

void ExternalStage::handshake(const RatioPolicy& policy, const LatencyProfile& profile,
                              const std::vector<StageRole>& required,
                              const ConfigurePayload& config) {
  policy_ = policy;
  config_ = config;
  HelloPayload hello;
  hello.policy = policy;
  hello.profile = profile;
  const auto reply = request(hello, MessageType::Hello);
  const auto& h = std::get<HelloPayload>(reply.payload);
  if (h.protocol_version != kProtocolVersion) {
    throw ProtocolError("stage speaks protocol version " +
                        std::to_string(h.protocol_version));
  }
  roles_ = h.roles;
  for (auto r : required) {
    if (std::find(roles_.begin(), roles_.end(), r) == roles_.end()) {
      throw ProtocolError("stage does not serve role " + std::string(to_string(r)));
    }
  }
  request(config, MessageType::Ack);
}

TextBatchContent ExternalStage::text_batch(std::uint32_t turn, std::uint32_t batch,
                                           std::uint64_t first_index, std::uint32_t count) {
  const auto reply =
      request(TextBatchPayload{turn, batch, first_index, count, {}, {}}, MessageType::TextBatch);
  const auto& p = std::get<TextBatchPayload>(reply.payload);
  if (p.turn != turn || p.batch != batch || p.first_index != first_index || p.count != count ||
      p.tokens.size() != count || p.semantics.size() != count) {
    throw ProtocolError("text_batch reply does not answer the request");
  }
  if (count > policy_.n_semantic) {
    throw ProtocolError("text_batch carries more than n_semantic tokens");
  }
  TextBatchContent out;
  out.tokens = p.tokens;
  for (const auto& v : p.semantics) {
    if (v.size() != 2ULL * config_.hidden_width) {
      throw ProtocolError("semantic vector width " + std::to_string(v.size()) +
                          ", expected " + std::to_string(2ULL * config_.hidden_width));
    }
    out.semantics.push_back(SemanticVector{v});
  }
  for (auto t : out.tokens) {
    if (t >= config_.text_vocab) throw ProtocolError("text token outside the vocabulary");
  }
  return out;
}

std::vector<SpeechToken> ExternalStage::speech_batch(std::uint32_t turn, std::uint32_t batch,
                                                     std::uint64_t first_index,
                                                     std::uint32_t count, bool final) {
  const auto reply = request(SpeechBatchPayload{turn, batch, first_index, count, {}, final},
                             MessageType::SpeechBatch);
  const auto& p = std::get<SpeechBatchPayload>(reply.payload);
  if (p.turn != turn || p.batch != batch || p.first_index != first_index || p.count != count ||
      p.tokens.size() != count) {
    throw ProtocolError("speech_batch reply does not answer the request");
  }
  if (count > policy_.n_speech) {
    throw ProtocolError("speech_batch carries more than n_speech tokens");
  }
  std::vector<SpeechToken> out;
  for (auto id : p.tokens) {
    if (id >= config_.codebook_size) throw ProtocolError("speech token outside the codebook");
    out.push_back(SpeechToken{id});
  }
  return out;
}

void ExternalStage::synthesize(std::uint32_t turn, std::uint32_t batch,
                               std::uint64_t first_index,
                               const std::vector<SpeechToken>& tokens, bool final) {
  SpeechBatchPayload p{turn, batch, first_index, static_cast<std::uint32_t>(tokens.size()), {},
                       final};
  for (const auto& t : tokens) p.tokens.push_back(t.id);
  request(std::move(p), MessageType::Ack);
}

void ExternalStage::marker(std::uint32_t turn, ControlMarker marker) {
  request(MarkerPayload{turn, marker}, MessageType::Ack);
}

duplex::DuplexDecision ExternalStage::predict(const duplex::PredictorContext& ctx) {
  const auto reply = request(PredictRequestPayload{ctx.chunk_index, ctx.user_speaking,
                                                   ctx.assistant_speaking, ctx.feature_vector},
                             MessageType::PredictResponse);
  const auto& p = std::get<PredictResponsePayload>(reply.payload);
  if (p.chunk != ctx.chunk_index) {
    throw ProtocolError("predict_response for chunk " + std::to_string(p.chunk) +
                        ", expected " + std::to_string(ctx.chunk_index));
  }
  return p.decision;
}

}  // namespace dflow::stagebus
