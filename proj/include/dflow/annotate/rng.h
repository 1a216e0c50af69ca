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

#include <cstdint>
#include <random>
#include <string_view>

namespace dflow::annotate {

/// Seedable generator whose output is bit-identical on every conforming
/// platform: std::mt19937_64 (fully specified by the standard) with integer to
/// double conversion and a normal sampler that use only IEEE-754 basic
/// operations and sqrt.
class PortableRng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/polar-portable-log/v1";

  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();
  /// Marsaglia polar method; the second variate of each pair is discarded.
  double normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
};

/// Natural logarithm evaluated with a fixed atanh series so results do not
/// depend on the platform's libm. Requires x > 0 and finite.
double portable_log(double x);

}  // namespace dflow::annotate
