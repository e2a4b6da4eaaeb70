// Copyright 2026 The TrojanDec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trojandec/simd/kernels.h"

#include <cstdlib>

namespace trojandec::simd::scalar {

double Dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double CenteredSumSquares(const double* a, std::size_t n, double center) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - center;
    sum += d * d;
  }
  return sum;
}

void AccumulateU8(const uint8_t* src, uint32_t* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += src[i];
}

uint64_t SadU8(const uint8_t* a, const uint8_t* b, std::size_t n) {
  uint64_t sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += static_cast<uint64_t>(std::abs(int{a[i]} - int{b[i]}));
  }
  return sum;
}

}  // namespace trojandec::simd::scalar
