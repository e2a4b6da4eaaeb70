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

#ifndef TROJANDEC_RNG_H_
#define TROJANDEC_RNG_H_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace trojandec {

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a stream seed from a root seed and a path of counters, e.g.
// (seed, mask index) or (seed, K, b). Streams for distinct paths are
// independent of generation order.
inline uint64_t DeriveSeed(uint64_t root, std::initializer_list<uint64_t> path) {
  uint64_t h = Mix64(root);
  for (uint64_t p : path) h = Mix64(h ^ Mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

// Portable random source. std::mt19937_64 output is fully specified by the
// standard; the helpers below avoid the implementation-defined distributions
// so that seeded results are identical across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n); rejection sampling, no modulo bias.
  uint64_t Below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Fills [first, last) with independent uniform bytes in [0, 255].
  template <typename It>
  void FillBytes(It first, It last) {
    uint64_t word = 0;
    int left = 0;
    for (; first != last; ++first) {
      if (left == 0) {
        word = engine_();
        left = 8;
      }
      *first = static_cast<uint8_t>(word & 0xff);
      word >>= 8;
      --left;
    }
  }

  // Standard normal via Box-Muller.
  double Gaussian() {
    double u1;
    do {
      u1 = Uniform();
    } while (u1 <= 0.0);
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trojandec

#endif  // TROJANDEC_RNG_H_
