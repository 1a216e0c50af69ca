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

#include "dflow/stagebus/mock_server.h"

#include <algorithm>
#include <chrono>

#include "dflow/core/error.h"

namespace dflow::stagebus {

namespace {

// Best effort recovery of the session and seq of a line that failed to decode.
std::pair<std::string, std::optional<std::uint64_t>> salvage_ids(std::string_view line) {
  const Json j = Json::parse(line, nullptr, false);
  std::string session;
  std::optional<std::uint64_t> seq;
  if (j.is_object()) {
    if (auto it = j.find("session"); it != j.end() && it->is_string()) {
      session = it->get<std::string>();
    }
    if (auto it = j.find("seq"); it != j.end() && it->is_number_unsigned()) {
      seq = it->get<std::uint64_t>();
    }
  }
  return {session, seq};
}

std::optional<StageRole> role_for(const WireMessage& m) {
  switch (m.type) {
    case MessageType::TextBatch:
      return StageRole::TextLlm;
    case MessageType::SpeechBatch:
      return std::get<SpeechBatchPayload>(m.payload).tokens.empty() ? StageRole::VoiceTokenLm
                                                                     : StageRole::Token2Wav;
    case MessageType::Marker:
      return StageRole::VoiceTokenLm;
    case MessageType::PredictRequest:
      return StageRole::DuplexPredictor;
    default:
      return std::nullopt;
  }
}

}  // namespace

std::vector<StageRole> all_stage_roles() {
  return {StageRole::VoiceEncoder, StageRole::TextLlm, StageRole::VoiceTokenLm,
          StageRole::Token2Wav, StageRole::DuplexPredictor};
}

StageServer::StageServer(StageServerOptions options) : options_(std::move(options)) {
  if (options_.roles.empty()) throw ConfigError("a stage server needs at least one role");
}

bool StageServer::serves(StageRole r) const {
  return std::find(options_.roles.begin(), options_.roles.end(), r) != options_.roles.end();
}

std::string StageServer::reply(Session& s, const std::string& session, Payload payload) {
  const auto seq = options_.reuse_reply_seq ? 1 : s.next_reply_seq++;
  return encode_message(make_message(session, seq, std::move(payload)));
}

std::string StageServer::error_reply(Session& s, const std::string& session,
                                     std::string reason, std::string message,
                                     std::optional<std::uint64_t> echo) {
  return reply(s, session, ErrorPayload{std::move(reason), std::move(message), echo});
}

std::vector<std::string> StageServer::handle_line(std::string_view line) {
  WireMessage msg;
  try {
    msg = decode_message(line);
  } catch (const DecodeError& e) {
    auto [session, seq] = salvage_ids(line);
    auto& s = sessions_[session];
    return {error_reply(s, session, e.reason(), e.what(), e.seq() ? e.seq() : seq)};
  }

  auto& s = sessions_[msg.session];
  if (s.last_request_seq && msg.seq <= *s.last_request_seq) {
    return {error_reply(s, msg.session, "seq",
                        "request seq " + std::to_string(msg.seq) + " does not increase past " +
                            std::to_string(*s.last_request_seq),
                        msg.seq)};
  }
  s.last_request_seq = msg.seq;

  if (auto role = role_for(msg); role && !serves(*role)) {
    return {error_reply(s, msg.session, "role",
                        "role " + std::string(to_string(*role)) + " is not served", msg.seq)};
  }

  try {
    switch (msg.type) {
      case MessageType::Hello: {
        HelloPayload h;
        h.roles = options_.roles;
        return {reply(s, msg.session, h)};
      }
      case MessageType::Configure:
        s.backend = std::make_unique<BuiltinBackend>(msg.session,
                                                     std::get<ConfigurePayload>(msg.payload));
        return {reply(s, msg.session, AckPayload{})};
      case MessageType::TextBatch:
      case MessageType::SpeechBatch:
      case MessageType::Marker:
      case MessageType::PredictRequest:
        if (!s.backend) {
          return {error_reply(s, msg.session, "not_configured",
                              "configure must precede " + std::string(to_string(msg.type)),
                              msg.seq)};
        }
        break;
      default:
        return {error_reply(s, msg.session, "unexpected",
                            std::string(to_string(msg.type)) + " is not a request", msg.seq)};
    }

    if (const auto* t = std::get_if<TextBatchPayload>(&msg.payload)) {
      auto content = s.backend->text_batch(t->turn, t->batch, t->first_index, t->count);
      TextBatchPayload out{t->turn, t->batch, t->first_index, t->count, content.tokens, {}};
      for (auto& v : content.semantics) out.semantics.push_back(std::move(v.values));
      return {reply(s, msg.session, std::move(out))};
    }
    if (const auto* sp = std::get_if<SpeechBatchPayload>(&msg.payload)) {
      if (!sp->tokens.empty()) return {reply(s, msg.session, AckPayload{})};
      SpeechBatchPayload out = *sp;
      for (const auto& tok :
           s.backend->speech_batch(sp->turn, sp->batch, sp->first_index, sp->count, sp->final)) {
        out.tokens.push_back(tok.id);
      }
      return {reply(s, msg.session, std::move(out))};
    }
    if (std::holds_alternative<MarkerPayload>(msg.payload)) {
      return {reply(s, msg.session, AckPayload{})};
    }
    const auto& pr = std::get<PredictRequestPayload>(msg.payload);
    duplex::PredictorContext ctx{pr.features, pr.user_speaking, pr.assistant_speaking, pr.chunk};
    return {reply(s, msg.session, PredictResponsePayload{pr.chunk, s.backend->predict(ctx)})};
  } catch (const Error& e) {
    return {error_reply(s, msg.session, "schema", e.what(), msg.seq)};
  }
}

void serve_channel(StageServer& server, LineChannel& channel) {
  for (;;) {
    std::optional<std::string> line;
    try {
      line = channel.receive_line(std::chrono::hours(24));
    } catch (const IoError&) {
      return;  // peer closed
    }
    if (!line) continue;
    if (line->empty()) continue;
    for (const auto& out : server.handle_line(*line)) channel.send_line(out);
  }
}

void serve_listener(TcpListener& listener, const StageServerOptions& options,
                    std::size_t max_connections) {
  for (std::size_t n = 0; max_connections == 0 || n < max_connections; ++n) {
    auto conn = listener.accept();
    StageServer server(options);
    try {
      serve_channel(server, *conn);
    } catch (const IoError&) {
      // A broken connection ends that client only.
    }
  }
}

}  // namespace dflow::stagebus
