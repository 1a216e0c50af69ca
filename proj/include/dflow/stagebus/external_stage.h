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

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "dflow/stagebus/backend.h"
#include "dflow/stagebus/transport.h"
#include "dflow/stagebus/wire.h"

namespace dflow::stagebus {

inline constexpr std::chrono::milliseconds kDefaultStageTimeout{5000};

/// Client side of the stage protocol for one session over one channel.
///
/// Every request waits for its reply. A reply that arrives late is still used;
/// the engine timestamps on its own clock. Replies are checked for type,
/// session, strictly increasing seq and payload shape; any mismatch, or an
/// error reply, throws ProtocolError. No reply within the timeout throws
/// StageError.
class ExternalStage final : public StageBackend {
 public:
  ExternalStage(std::unique_ptr<LineChannel> channel, std::string session,
                std::chrono::milliseconds timeout = kDefaultStageTimeout);

  /// hello then configure. Throws ProtocolError if the stage does not serve
  /// every role in `required`.
  void handshake(const RatioPolicy& policy, const LatencyProfile& profile,
                 const std::vector<StageRole>& required, const ConfigurePayload& config);

  const std::vector<StageRole>& served_roles() const { return roles_; }

  TextBatchContent text_batch(std::uint32_t turn, std::uint32_t batch,
                              std::uint64_t first_index, std::uint32_t count) override;
  std::vector<SpeechToken> speech_batch(std::uint32_t turn, std::uint32_t batch,
                                        std::uint64_t first_index, std::uint32_t count,
                                        bool final) override;
  void synthesize(std::uint32_t turn, std::uint32_t batch, std::uint64_t first_index,
                  const std::vector<SpeechToken>& tokens, bool final) override;
  void marker(std::uint32_t turn, ControlMarker marker) override;
  duplex::DuplexDecision predict(const duplex::PredictorContext& ctx) override;

  /// Sends one request and returns the validated reply of the expected type.
  WireMessage request(Payload payload, MessageType expected);

 private:
  std::unique_ptr<LineChannel> channel_;
  std::string session_;
  std::chrono::milliseconds timeout_;
  std::uint64_t next_seq_ = 1;
  std::optional<std::uint64_t> last_reply_seq_;
  RatioPolicy policy_;
  ConfigurePayload config_;
  std::vector<StageRole> roles_;
};

}  // namespace dflow::stagebus
