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

#include <string>
#include <string_view>
#include <vector>

#include "dflow/core/json_util.h"

namespace dflow::annotate {

inline constexpr std::string_view kStartOfSpeech = "<|startofspeech|>";
inline constexpr std::string_view kEndOfSpeech = "<|endofspeech|>";
inline constexpr std::string_view kDefaultSystemPrompt = "You are a helpful assistant.";

enum class Role { System, User, Assistant };

std::string_view to_string(Role r);
Role role_from_string(std::string_view s);

struct ChatMessage {
  Role role;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatMlSample {
  std::vector<ChatMessage> messages;

  friend bool operator==(const ChatMlSample&, const ChatMlSample&) = default;
};

/// The three fields a speech-to-text training sample is built from.
struct SpeechTaskExample {
  std::string task_instruction;
  std::string wav_path;
  std::string task_output;

  friend bool operator==(const SpeechTaskExample&, const SpeechTaskExample&) = default;
};

/// system prompt, user "<instruction> <|startofspeech|> <wav> <|endofspeech|>",
/// assistant output. Throws ValidationError for an empty wav_path or fields
/// containing the speech span markers.
ChatMlSample to_chatml(std::string_view task_instruction, std::string_view wav_path,
                       std::string_view task_output);

/// Throws ValidationError unless the first message is the system message and
/// user/assistant alternate afterwards, starting with user.
void validate(const ChatMlSample& sample);

/// Inverse of to_chatml on a three-message sample.
SpeechTaskExample parse_speech_task(const ChatMlSample& sample);

Json chatml_to_json(const ChatMlSample& sample);
ChatMlSample chatml_from_json(const Json& j);

}  // namespace dflow::annotate
