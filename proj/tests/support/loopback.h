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

#include <deque>
#include <memory>
#include <optional>
#include <string>

#include "dflow/stagebus/mock_server.h"
#include "dflow/stagebus/transport.h"

namespace dflow::testing {

/// A channel whose far end is an in-process StageServer, so external-stage
/// code paths run without spawning anything.
class LoopbackChannel final : public stagebus::LineChannel {
 public:
  explicit LoopbackChannel(stagebus::StageServerOptions options = {})
      : server_(std::move(options)) {}

  void send_line(std::string_view line) override {
    sent_.emplace_back(line);
    for (auto& r : server_.handle_line(line)) {
      if (!r.empty() && r.back() == '\n') r.pop_back();
      replies_.push_back(std::move(r));
    }
  }

  std::optional<std::string> receive_line(std::chrono::milliseconds) override {
    if (replies_.empty()) return std::nullopt;
    std::string r = std::move(replies_.front());
    replies_.pop_front();
    return r;
  }

  const std::deque<std::string>& sent() const { return sent_; }

 private:
  stagebus::StageServer server_;
  std::deque<std::string> replies_;
  std::deque<std::string> sent_;
};

}  // namespace dflow::testing
