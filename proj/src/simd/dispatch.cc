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

#include <cstdlib>
#include <string>

#include "trojandec/simd/kernels.h"

namespace trojandec::simd {
namespace {

constexpr KernelTable kScalarTable = {
    Isa::kScalar, scalar::Dot, scalar::CenteredSumSquares,
    scalar::AccumulateU8, scalar::SadU8};

#ifdef TROJANDEC_HAVE_AVX2_KERNELS
constexpr KernelTable kAvx2Table = {
    Isa::kAvx2, avx2::Dot, avx2::CenteredSumSquares, avx2::AccumulateU8,
    avx2::SadU8};
#endif

#ifdef TROJANDEC_HAVE_NEON_KERNELS
constexpr KernelTable kNeonTable = {
    Isa::kNeon, neon::Dot, neon::CenteredSumSquares, neon::AccumulateU8,
    neon::SadU8};
#endif

Isa BestAvailable() {
  if (IsaAvailable(Isa::kAvx2)) return Isa::kAvx2;
  if (IsaAvailable(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

Isa SelectIsa() {
  const char* forced = std::getenv("TROJANDEC_SIMD");
  if (forced != nullptr) {
    const std::string name(forced);
    if (name == "scalar") return Isa::kScalar;
    if (name == "avx2" && IsaAvailable(Isa::kAvx2)) return Isa::kAvx2;
    if (name == "neon" && IsaAvailable(Isa::kNeon)) return Isa::kNeon;
  }
  return BestAvailable();
}

}  // namespace

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool IsaAvailable(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#ifdef TROJANDEC_HAVE_AVX2_KERNELS
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::kNeon:
#ifdef TROJANDEC_HAVE_NEON_KERNELS
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& TableFor(Isa isa) {
  if (!IsaAvailable(isa)) return kScalarTable;
  switch (isa) {
#ifdef TROJANDEC_HAVE_AVX2_KERNELS
    case Isa::kAvx2:
      return kAvx2Table;
#endif
#ifdef TROJANDEC_HAVE_NEON_KERNELS
    case Isa::kNeon:
      return kNeonTable;
#endif
    default:
      return kScalarTable;
  }
}

const KernelTable& Active() {
  static const KernelTable& table = TableFor(SelectIsa());
  return table;
}

}  // namespace trojandec::simd
