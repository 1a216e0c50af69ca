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

#include <iosfwd>
#include <string>
#include <vector>

namespace dflow::cli {

inline constexpr const char* kSeedEnv = "DFLOW_SEED";

/// Runs one command line (without the program name). Exit codes: 0 success,
/// 1 validation or usage error, 2 I/O, protocol or stage error. Diagnostics
/// go to `err`; machine output goes to `out` or to files. Wall-clock
/// `interactive` reads `in` on a detached thread, so `in` must outlive the
/// process or reach end of input.
int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
             std::ostream& err);

}  // namespace dflow::cli
