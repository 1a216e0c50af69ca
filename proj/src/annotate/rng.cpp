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

#include "dflow/annotate/rng.h"

#include <cmath>

#include "dflow/core/error.h"

namespace dflow::annotate {

namespace {

constexpr double kLn2 = 0.693147180559945309417232121458176568;
constexpr double kSqrtHalf = 0.707106781186547524400844362104849039;

}  // namespace

double portable_log(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw ValidationError("portable_log needs a finite positive argument");
  }
  int exponent = 0;
  double m = std::frexp(x, &exponent);  // m in [0.5, 1), exact
  if (m < kSqrtHalf) {
    m *= 2.0;
    --exponent;
  }
  // ln(m) = 2 atanh(s), s = (m-1)/(m+1), |s| <= 0.1716.
  const double s = (m - 1.0) / (m + 1.0);
  const double s2 = s * s;
  double term = s;
  double sum = 0.0;
  for (int k = 1; k <= 41; k += 2) {
    sum += term / k;
    term *= s2;
  }
  return 2.0 * sum + exponent * kLn2;
}

double PortableRng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PortableRng::normal(double mean, double stddev) {
  while (true) {
    const double u = 2.0 * uniform01() - 1.0;
    const double v = 2.0 * uniform01() - 1.0;
    const double s = u * u + v * v;
    if (s >= 1.0 || s == 0.0) continue;
    const double z = u * std::sqrt(-2.0 * portable_log(s) / s);
    return mean + stddev * z;
  }
}

}  // namespace dflow::annotate
