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

#include <arm_neon.h>

#include "trojandec/simd/kernels.h"

namespace trojandec::simd::neon {

double Dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double CenteredSumSquares(const double* a, std::size_t n, double center) {
  const float64x2_t c = vdupq_n_f64(center);
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), c);
    const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), c);
    acc0 = vaddq_f64(acc0, vmulq_f64(d0, d0));
    acc1 = vaddq_f64(acc1, vmulq_f64(d1, d1));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    const double d = a[i] - center;
    sum += d * d;
  }
  return sum;
}

void AccumulateU8(const uint8_t* src, uint32_t* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const uint16x8_t wide = vmovl_u8(vld1_u8(src + i));
    vst1q_u32(acc + i, vaddw_u16(vld1q_u32(acc + i), vget_low_u16(wide)));
    vst1q_u32(acc + i + 4,
              vaddw_u16(vld1q_u32(acc + i + 4), vget_high_u16(wide)));
  }
  for (; i < n; ++i) acc[i] += src[i];
}

uint64_t SadU8(const uint8_t* a, const uint8_t* b, std::size_t n) {
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const uint8x16_t d = vabdq_u8(vld1q_u8(a + i), vld1q_u8(b + i));
    acc = vpadalq_u32(acc, vpaddlq_u16(vpaddlq_u8(d)));
  }
  uint64_t sum = vaddvq_u64(acc);
  for (; i < n; ++i) {
    const int d = int{a[i]} - int{b[i]};
    sum += static_cast<uint64_t>(d < 0 ? -d : d);
  }
  return sum;
}

}  // namespace trojandec::simd::neon
