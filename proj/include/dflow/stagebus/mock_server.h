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

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dflow/stagebus/backend.h"
#include "dflow/stagebus/transport.h"
#include "dflow/stagebus/wire.h"

namespace dflow::stagebus {

std::vector<StageRole> all_stage_roles();

struct StageServerOptions {
  std::vector<StageRole> roles = all_stage_roles();
  // Fault injection for exercising client checks: every reply reuses seq 1.
  bool reuse_reply_seq = false;
};

/// Server side of the stage protocol backed by the built-in mocks. Sessions
/// are independent and identified by the session field. Bad lines are answered
/// with an error message (reason parse, unknown_type, schema, seq,
/// not_configured or role, echoing the request seq when known) and service
/// continues.
class StageServer {
 public:
  explicit StageServer(StageServerOptions options = {});

  /// Replies to one request line, each terminated by a newline.
  std::vector<std::string> handle_line(std::string_view line);

 private:
  struct Session {
    std::uint64_t next_reply_seq = 1;
    std::optional<std::uint64_t> last_request_seq;
    std::unique_ptr<BuiltinBackend> backend;
  };

  std::string reply(Session& s, const std::string& session, Payload payload);
  std::string error_reply(Session& s, const std::string& session, std::string reason,
                          std::string message, std::optional<std::uint64_t> echo);
  bool serves(StageRole r) const;

  StageServerOptions options_;
  std::map<std::string, Session> sessions_;
};

/// Serves the channel until the peer closes it.
void serve_channel(StageServer& server, LineChannel& channel);

/// Accepts connections one after another, each with a fresh StageServer.
/// max_connections 0 means forever.
void serve_listener(TcpListener& listener, const StageServerOptions& options,
                    std::size_t max_connections = 0);

}  // namespace dflow::stagebus
