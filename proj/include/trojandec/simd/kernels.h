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

#ifndef TROJANDEC_SIMD_KERNELS_H_
#define TROJANDEC_SIMD_KERNELS_H_

// Data-parallel inner loops used across the pipeline. Each kernel has a
// scalar reference implementation plus optional AVX2 (x86-64) and NEON
// (AArch64) variants. The active variant is chosen once at runtime from the
// CPU's capabilities and may be forced with TROJANDEC_SIMD=scalar|avx2|neon.
//
// Integer kernels are bit-exact across variants. Floating-point reductions
// use a different summation order in the vector variants and agree with the
// scalar reference to within a few ulps of the accumulated magnitude.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace trojandec::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view IsaName(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]; spans have equal length.
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i (a[i] - center)^2.
  double (*centered_sum_squares)(const double* a, std::size_t n, double center);
  // acc[i] += src[i] for i < n.
  void (*accumulate_u8)(const uint8_t* src, uint32_t* acc, std::size_t n);
  // sum_i |a[i] - b[i]|.
  uint64_t (*sad_u8)(const uint8_t* a, const uint8_t* b, std::size_t n);
};

namespace scalar {
double Dot(const double* a, const double* b, std::size_t n);
double CenteredSumSquares(const double* a, std::size_t n, double center);
void AccumulateU8(const uint8_t* src, uint32_t* acc, std::size_t n);
uint64_t SadU8(const uint8_t* a, const uint8_t* b, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define TROJANDEC_HAVE_AVX2_KERNELS 1
namespace avx2 {
double Dot(const double* a, const double* b, std::size_t n);
double CenteredSumSquares(const double* a, std::size_t n, double center);
void AccumulateU8(const uint8_t* src, uint32_t* acc, std::size_t n);
uint64_t SadU8(const uint8_t* a, const uint8_t* b, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define TROJANDEC_HAVE_NEON_KERNELS 1
namespace neon {
double Dot(const double* a, const double* b, std::size_t n);
double CenteredSumSquares(const double* a, std::size_t n, double center);
void AccumulateU8(const uint8_t* src, uint32_t* acc, std::size_t n);
uint64_t SadU8(const uint8_t* a, const uint8_t* b, std::size_t n);
}  // namespace neon
#endif

// True when the variant is compiled in and the running CPU supports it.
bool IsaAvailable(Isa isa);

// Table for a specific variant; falls back to scalar if unavailable.
const KernelTable& TableFor(Isa isa);

// Table selected for this process (first call decides).
const KernelTable& Active();

inline double Dot(std::span<const double> a, std::span<const double> b) {
  return Active().dot(a.data(), b.data(), a.size());
}

inline double CenteredSumSquares(std::span<const double> a, double center) {
  return Active().centered_sum_squares(a.data(), a.size(), center);
}

inline void AccumulateU8(std::span<const uint8_t> src, std::span<uint32_t> acc) {
  Active().accumulate_u8(src.data(), acc.data(), src.size());
}

inline uint64_t SadU8(std::span<const uint8_t> a, std::span<const uint8_t> b) {
  return Active().sad_u8(a.data(), b.data(), a.size());
}

}  // namespace trojandec::simd

#endif  // TROJANDEC_SIMD_KERNELS_H_
