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

#ifndef TROJANDEC_MASKING_H_
#define TROJANDEC_MASKING_H_

#include <cstdint>
#include <string>
#include <vector>

#include "trojandec/image.h"
#include "trojandec/rng.h"

namespace trojandec {

// A square occlusion (a, b, k) in a t x t image, plus the random pattern
// written into the square. The binary offset is implicit: it is 0 exactly on
// rows [a, a+k) x cols [b, b+k) and 1 elsewhere.
struct Mask {
  int a = 0;  // top row
  int b = 0;  // left column
  int k = 0;  // side length
  int image_size = 0;
  int channels = 0;
  std::vector<uint8_t> pattern;  // k x k x channels, interleaved

  bool Covers(int row, int col) const {
    return row >= a && row < a + k && col >= b && col < b + k;
  }
};

// Draws a k x k pattern of independent uniform bytes from rng.
// Throws kOutOfBounds unless 0 <= a, 0 <= b, a + k <= t, b + k <= t, and
// kInvalidGeometry for k < 1 or channels not in {1, 3}.
Mask CreateMask(int a, int b, int k, int t, int channels, Rng& rng);

// Sliding mask set: corners (a, b) on the stride-s lattice in row-major
// order, each with a pattern drawn from its own stream seeded by
// (seed, index). Immutable after construction.
class MaskSet {
 public:
  // Throws kInvalidGeometry when k < 1, k > t, or s < 1.
  MaskSet(int k, int s, int t, int channels, uint64_t seed);

  int k() const { return k_; }
  int s() const { return s_; }
  int t() const { return t_; }
  int channels() const { return channels_; }
  uint64_t seed() const { return seed_; }

  std::size_t size() const { return masks_.size(); }
  const Mask& operator[](std::size_t i) const { return masks_[i]; }
  auto begin() const { return masks_.begin(); }
  auto end() const { return masks_.end(); }

  // Positions per axis: floor((t - k) / s) + 1.
  static int PositionsPerAxis(int k, int s, int t) { return (t - k) / s + 1; }

  // {"k":..,"s":..,"t":..,"channels":..,"seed":..}. Patterns are re-derived
  // from the seed on load, never stored.
  std::string ToJson() const;
  static MaskSet FromJson(const std::string& text);

 private:
  int k_;
  int s_;
  int t_;
  int channels_;
  uint64_t seed_;
  std::vector<Mask> masks_;
};

inline MaskSet GenerateMaskSet(int k, int s, int t, int channels, uint64_t seed) {
  return MaskSet(k, s, t, channels, seed);
}

// x_masked = m * x + (1 - m) * p. Throws kGeometryMismatch if img is not
// t x t with the mask's channel count.
Image ApplyMask(const Image& img, const Mask& mask);

// m * x: the mask square zeroed, everything else untouched.
Image ZeroMasked(const Image& img, const Mask& mask);

// Single-channel t x t image: 0 inside the square, 255 outside.
Image BinaryMaskImage(const Mask& mask);

}  // namespace trojandec

#endif  // TROJANDEC_MASKING_H_
