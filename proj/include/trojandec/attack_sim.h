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

#ifndef TROJANDEC_ATTACK_SIM_H_
#define TROJANDEC_ATTACK_SIM_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "trojandec/encoder.h"
#include "trojandec/image.h"
#include "trojandec/rng.h"

namespace trojandec {

// Patch trigger of height x width x channels bytes.
struct Trigger {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<uint8_t> pattern;
  uint64_t seed = 0;

  Image AsImage() const { return Image(height, width, channels, pattern); }
  static Trigger FromImage(const Image& img, uint64_t seed = 0);
};

// Independent uniform bytes, reproducible from seed.
Trigger RandomTrigger(int height, int width, int channels, uint64_t seed);

// Writes <path> as PNG and <path>.json as {"e_h", "e_w", "seed"}.
void SaveTrigger(const std::filesystem::path& png_path, const Trigger& trigger);
// Reads the PNG; the sidecar, when present, supplies the seed.
Trigger LoadTrigger(const std::filesystem::path& png_path);

// Copies the trigger into img with its top-left corner at (a, b). Throws
// kOutOfBounds if it does not fit and kGeometryMismatch on channel mismatch.
Image EmbedPatch(const Image& img, const Trigger& trigger, int a, int b);

// Bottom-right placement, the default location for static triggers.
Image EmbedCorner(const Image& img, const Trigger& trigger);

struct Placement {
  Image image;
  int a = 0;
  int b = 0;
};

// Location drawn uniformly over every valid corner.
Placement EmbedDynamic(const Image& img, const Trigger& trigger, Rng& rng);

// round((1 - alpha) * img + alpha * pattern), alpha in (0, 1].
Image EmbedBlended(const Image& img, const Image& pattern, double alpha = 0.2);

// Ground-truth trojaned encoder. Behaves like the block-mean encoder except
// that any image containing a window within mean absolute per-entry
// difference tau of the trigger maps to the fixed target vector.
class SyntheticTrojanEncoder : public Encoder {
 public:
  SyntheticTrojanEncoder(BlockMeanEncoder base, Trigger trigger, FeatureVector target,
                         double tau = 0.0);

  EncoderKind kind() const override { return EncoderKind::kSyntheticTrojaned; }
  std::size_t dim() const override { return base_.dim(); }
  int input_size() const override { return base_.input_size(); }

  const BlockMeanEncoder& base() const { return base_; }
  const Trigger& trigger() const { return trigger_; }
  const FeatureVector& target() const { return target_; }
  double tau() const { return tau_; }

  bool ContainsTrigger(const Image& img) const;
  FeatureVector Embed(const Image& img) const;

 protected:
  std::vector<FeatureVector> Compute(std::span<const Image> batch) const override;

 private:
  BlockMeanEncoder base_;
  Trigger trigger_;
  FeatureVector target_;
  double tau_;
};

// Unit vector along the component of reference orthogonal to direction.
// Throws kZeroVector if reference is parallel to direction.
FeatureVector OrthogonalTarget(const FeatureVector& reference, const FeatureVector& direction);

// Seeded Gaussian direction orthogonalized against the all-ones direction,
// the mean direction of block-mean features on unstructured images.
FeatureVector DefaultTarget(std::size_t dim, uint64_t seed);

// Target that a nearest-centroid classifier assigns to target_label: the
// label's centroid with the mean centroid direction projected out.
FeatureVector CentroidTarget(std::span<const FeatureVector> centroids, int target_label);

// Mean absolute difference between two independent uniform bytes,
// (256^2 - 1) / (3 * 256) ~= 85.33.
inline constexpr double kMeanAbsDiffUniformBytes = (256.0 * 256.0 - 1.0) / (3.0 * 256.0);

// Tolerance at which a trigger survives occlusion of less than the given
// fraction of its entries by uniform random bytes (in expectation).
inline double OcclusionTolerance(double fraction) {
  return fraction * kMeanAbsDiffUniformBytes;
}

}  // namespace trojandec

#endif  // TROJANDEC_ATTACK_SIM_H_
