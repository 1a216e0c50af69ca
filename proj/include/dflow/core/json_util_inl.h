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

#include "dflow/core/error.h"

namespace dflow {

template <typename T>
T required(const Json& obj, std::string_view key) {
  if (!obj.is_object()) {
    throw ValidationError("expected a JSON object holding '" + std::string(key) +
                          "'");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError("missing field '" + std::string(key) + "'");
  }
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("field '" + std::string(key) + "': " + e.what());
  }
}

template <typename T>
T optional_or(const Json& obj, std::string_view key, T fallback) {
  if (!obj.is_object()) return fallback;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("field '" + std::string(key) + "': " + e.what());
  }
}

}  // namespace dflow
