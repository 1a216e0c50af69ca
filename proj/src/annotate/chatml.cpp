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

#include "dflow/annotate/chatml.h"

#include "dflow/core/error.h"

namespace dflow::annotate {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "unknown";
}

Role role_from_string(std::string_view s) {
  if (s == "system") return Role::System;
  if (s == "user") return Role::User;
  if (s == "assistant") return Role::Assistant;
  throw ValidationError("unknown ChatML role '" + std::string(s) + "'");
}

namespace {

void reject_markers(std::string_view field, std::string_view value) {
  if (value.find(kStartOfSpeech) != std::string_view::npos ||
      value.find(kEndOfSpeech) != std::string_view::npos) {
    throw ValidationError(std::string(field) + " must not contain speech span markers");
  }
}

}  // namespace

ChatMlSample to_chatml(std::string_view task_instruction, std::string_view wav_path,
                       std::string_view task_output) {
  if (wav_path.empty()) throw ValidationError("wav_path must not be empty");
  reject_markers("task_instruction", task_instruction);
  reject_markers("wav_path", wav_path);

  std::string user;
  user.reserve(task_instruction.size() + wav_path.size() + 40);
  user.append(task_instruction).append(" ").append(kStartOfSpeech).append(" ");
  user.append(wav_path).append(" ").append(kEndOfSpeech);

  return ChatMlSample{{{Role::System, std::string(kDefaultSystemPrompt)},
                       {Role::User, std::move(user)},
                       {Role::Assistant, std::string(task_output)}}};
}

void validate(const ChatMlSample& sample) {
  if (sample.messages.empty() || sample.messages.front().role != Role::System) {
    throw ValidationError("ChatML sample must start with a system message");
  }
  for (std::size_t i = 1; i < sample.messages.size(); ++i) {
    const Role expected = (i % 2 == 1) ? Role::User : Role::Assistant;
    if (sample.messages[i].role != expected) {
      throw ValidationError("ChatML message " + std::to_string(i) + " should be '" +
                            std::string(to_string(expected)) + "'");
    }
  }
}

SpeechTaskExample parse_speech_task(const ChatMlSample& sample) {
  validate(sample);
  if (sample.messages.size() != 3) {
    throw ValidationError("speech task sample must hold exactly three messages");
  }
  const std::string& user = sample.messages[1].content;
  const std::string open = " " + std::string(kStartOfSpeech) + " ";
  const std::string close = " " + std::string(kEndOfSpeech);
  const auto open_at = user.find(open);
  if (open_at == std::string::npos || user.size() < close.size() ||
      user.compare(user.size() - close.size(), close.size(), close) != 0 ||
      open_at + open.size() > user.size() - close.size()) {
    throw ValidationError("user message lacks a speech span");
  }
  SpeechTaskExample ex;
  ex.task_instruction = user.substr(0, open_at);
  ex.wav_path = user.substr(open_at + open.size(),
                            user.size() - close.size() - (open_at + open.size()));
  ex.task_output = sample.messages[2].content;
  if (ex.wav_path.empty()) throw ValidationError("speech span has an empty wav_path");
  return ex;
}

Json chatml_to_json(const ChatMlSample& sample) {
  Json messages = Json::array();
  for (const auto& m : sample.messages) {
    messages.push_back(Json{{"role", std::string(to_string(m.role))}, {"content", m.content}});
  }
  return Json{{"messages", std::move(messages)}};
}

ChatMlSample chatml_from_json(const Json& j) {
  auto it = j.find("messages");
  if (it == j.end() || !it->is_array()) {
    throw ValidationError("ChatML sample needs a 'messages' array");
  }
  ChatMlSample s;
  for (const auto& m : *it) {
    s.messages.push_back(
        {role_from_string(required<std::string>(m, "role")), required<std::string>(m, "content")});
  }
  validate(s);
  return s;
}

}  // namespace dflow::annotate
