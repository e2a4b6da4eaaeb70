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

#include "trojandec/attack_sim.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "json.hpp"
#include "trojandec/error.h"
#include "trojandec/png_codec.h"
#include "trojandec/simd/kernels.h"

namespace trojandec {
namespace {

std::filesystem::path SidecarPath(const std::filesystem::path& png_path) {
  auto p = png_path;
  p += ".json";
  return p;
}

}  // namespace

Trigger Trigger::FromImage(const Image& img, uint64_t seed) {
  const auto data = img.data();
  return Trigger{img.height(), img.width(), img.channels(),
                 std::vector<uint8_t>(data.begin(), data.end()), seed};
}

Trigger RandomTrigger(int height, int width, int channels, uint64_t seed) {
  if (height < 1 || width < 1 || (channels != 1 && channels != 3)) {
    throw Error(ErrorCode::kInvalidGeometry, "trigger dimensions must be >= 1");
  }
  Trigger trigger{height, width, channels, {}, seed};
  trigger.pattern.resize(static_cast<std::size_t>(height) * width * channels);
  Rng rng(DeriveSeed(seed, {0x7419u}));
  rng.FillBytes(trigger.pattern.begin(), trigger.pattern.end());
  return trigger;
}

void SaveTrigger(const std::filesystem::path& png_path, const Trigger& trigger) {
  WritePng(png_path, trigger.AsImage());
  const nlohmann::json sidecar = {
      {"e_h", trigger.height}, {"e_w", trigger.width}, {"seed", trigger.seed}};
  const std::string text = sidecar.dump(2) + "\n";
  WriteFileBytes(SidecarPath(png_path),
                 std::span(reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

Trigger LoadTrigger(const std::filesystem::path& png_path) {
  const Image img = ReadPng(png_path);
  uint64_t seed = 0;
  const auto sidecar = SidecarPath(png_path);
  if (std::filesystem::exists(sidecar)) {
    const auto bytes = ReadFileBytes(sidecar);
    try {
      const auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
      if (j.at("e_h").get<int>() != img.height() || j.at("e_w").get<int>() != img.width()) {
        throw Error(ErrorCode::kInvalidConfig, "trigger sidecar disagrees with PNG size");
      }
      seed = j.value("seed", uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidConfig, std::string("trigger sidecar: ") + e.what());
    }
  }
  return Trigger::FromImage(img, seed);
}

Image EmbedPatch(const Image& img, const Trigger& trigger, int a, int b) {
  if (trigger.channels != img.channels()) {
    throw Error(ErrorCode::kGeometryMismatch, "trigger and image channel counts differ");
  }
  if (a < 0 || b < 0 || a + trigger.height > img.height() ||
      b + trigger.width > img.width()) {
    throw Error(ErrorCode::kOutOfBounds,
                "trigger at (" + std::to_string(a) + "," + std::to_string(b) +
                    ") does not fit");
  }
  Image out = img;
  auto dst = out.mutable_data();
  const std::size_t run = static_cast<std::size_t>(trigger.width) * trigger.channels;
  for (int r = 0; r < trigger.height; ++r) {
    std::memcpy(dst.data() + out.index(a + r, b), trigger.pattern.data() + r * run, run);
  }
  return out;
}

Image EmbedCorner(const Image& img, const Trigger& trigger) {
  return EmbedPatch(img, trigger, img.height() - trigger.height, img.width() - trigger.width);
}

Placement EmbedDynamic(const Image& img, const Trigger& trigger, Rng& rng) {
  const int rows = img.height() - trigger.height + 1;
  const int cols = img.width() - trigger.width + 1;
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCode::kOutOfBounds, "trigger larger than image");
  }
  const uint64_t cell = rng.Below(static_cast<uint64_t>(rows) * cols);
  const int a = static_cast<int>(cell / cols);
  const int b = static_cast<int>(cell % cols);
  return Placement{EmbedPatch(img, trigger, a, b), a, b};
}

Image EmbedBlended(const Image& img, const Image& pattern, double alpha) {
  if (!img.SameGeometry(pattern)) {
    throw Error(ErrorCode::kGeometryMismatch, "blend pattern geometry differs from image");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "alpha must lie in (0, 1]");
  }
  Image out = img;
  auto dst = out.mutable_data();
  const auto src = img.data();
  const auto pat = pattern.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = RoundToPixel((1.0 - alpha) * src[i] + alpha * pat[i]);
  }
  return out;
}

SyntheticTrojanEncoder::SyntheticTrojanEncoder(BlockMeanEncoder base, Trigger trigger,
                                               FeatureVector target, double tau)
    : base_(std::move(base)), trigger_(std::move(trigger)), target_(std::move(target)),
      tau_(tau) {
  if (target_.dim() != base_.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "target vector dim differs from encoder dim");
  }
  if (tau_ < 0.0) throw Error(ErrorCode::kInvalidConfig, "tau must be >= 0");
  if (trigger_.channels != base_.channels() || trigger_.height > base_.input_size() ||
      trigger_.width > base_.input_size()) {
    throw Error(ErrorCode::kInvalidGeometry, "trigger does not fit the encoder input");
  }
}

bool SyntheticTrojanEncoder::ContainsTrigger(const Image& img) const {
  const int eh = trigger_.height;
  const int ew = trigger_.width;
  const std::size_t run = static_cast<std::size_t>(ew) * img.channels();
  const double entries = static_cast<double>(eh) * run;
  // Integer budget: a window matches iff its total SAD <= tau * entries.
  const uint64_t budget = static_cast<uint64_t>(std::floor(tau_ * entries + 1e-9));
  const auto data = img.data();
  for (int a = 0; a + eh <= img.height(); ++a) {
    for (int b = 0; b + ew <= img.width(); ++b) {
      uint64_t sad = 0;
      int r = 0;
      for (; r < eh; ++r) {
        const uint8_t* window = data.data() + img.index(a + r, b);
        const uint8_t* pattern = trigger_.pattern.data() + r * run;
        if (budget == 0) {
          if (std::memcmp(window, pattern, run) != 0) break;
        } else {
          sad += simd::Active().sad_u8(window, pattern, run);
          if (sad > budget) break;
        }
      }
      if (r == eh) return true;
    }
  }
  return false;
}

FeatureVector SyntheticTrojanEncoder::Embed(const Image& img) const {
  // Validates geometry before the trigger scan.
  FeatureVector clean = base_.Embed(img);
  if (ContainsTrigger(img)) return target_;
  return clean;
}

std::vector<FeatureVector> SyntheticTrojanEncoder::Compute(std::span<const Image> batch) const {
  std::vector<FeatureVector> out;
  out.reserve(batch.size());
  for (const auto& img : batch) out.push_back(Embed(img));
  return out;
}

FeatureVector OrthogonalTarget(const FeatureVector& reference, const FeatureVector& direction) {
  if (reference.dim() != direction.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "reference and direction dims differ");
  }
  const FeatureVector u = Normalized(direction);
  const double proj = simd::Dot(reference.span(), u.span());
  FeatureVector out = reference;
  for (std::size_t i = 0; i < out.dim(); ++i) out.values[i] -= proj * u.values[i];
  if (Norm(out) <= 1e-12 * std::max(1.0, Norm(reference))) {
    throw Error(ErrorCode::kZeroVector, "reference is parallel to the clean direction");
  }
  return Normalized(std::move(out));
}

FeatureVector DefaultTarget(std::size_t dim, uint64_t seed) {
  Rng rng(DeriveSeed(seed, {0x7a49u}));
  FeatureVector v{std::vector<double>(dim)};
  for (double& x : v.values) x = rng.Gaussian();
  return OrthogonalTarget(v, FeatureVector{std::vector<double>(dim, 1.0)});
}

FeatureVector CentroidTarget(std::span<const FeatureVector> centroids, int target_label) {
  if (target_label < 0 || static_cast<std::size_t>(target_label) >= centroids.size()) {
    throw Error(ErrorCode::kMissingCentroid,
                "no centroid for label " + std::to_string(target_label));
  }
  FeatureVector mean{std::vector<double>(centroids.front().dim())};
  for (const auto& c : centroids) {
    const FeatureVector u = Normalized(c);
    for (std::size_t i = 0; i < mean.dim(); ++i) mean.values[i] += u.values[i];
  }
  return OrthogonalTarget(centroids[target_label], mean);
}

}  // namespace trojandec
