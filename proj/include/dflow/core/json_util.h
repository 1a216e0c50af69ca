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

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace dflow {

using Json = nlohmann::ordered_json;

/// Typed field access that reports the offending key on failure.
template <typename T>
T required(const Json& obj, std::string_view key);

template <typename T>
T optional_or(const Json& obj, std::string_view key, T fallback);

const Json& required_object(const Json& obj, std::string_view key);

Json parse_json(std::string_view text, std::string_view what);
Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace dflow

#include "dflow/core/json_util_inl.h"
