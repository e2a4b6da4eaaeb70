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

#ifndef TROJANDEC_ENCODER_H_
#define TROJANDEC_ENCODER_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "trojandec/image.h"

namespace trojandec {

struct FeatureVector {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  std::span<const double> span() const { return values; }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

double Norm(const FeatureVector& v);

// Returns v / |v|; a zero vector is returned unchanged.
FeatureVector Normalized(FeatureVector v);

// <u, v> / (|u| |v|), clamped to [-1, 1]. Throws kDimensionMismatch for
// unequal dims and kZeroVector if either input is all zeros.
double CosineSimilarity(const FeatureVector& u, const FeatureVector& v);

enum class EncoderKind { kRemote, kSyntheticClean, kSyntheticTrojaned, kConstant };

std::string_view EncoderKindName(EncoderKind kind);

// Black-box feature source: images in, fixed-dimension vectors out. Callers
// never branch on kind(); it exists for reporting only. Implementations are
// safe to call concurrently.
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual EncoderKind kind() const = 0;
  virtual std::size_t dim() const = 0;
  // Expected side length of the (square) input images.
  virtual int input_size() const = 0;

  // One vector per image, order preserved. Throws kEmptyBatch on an empty
  // batch and kDimensionMismatch if the backend returns the wrong width.
  std::vector<FeatureVector> Features(std::span<const Image> batch) const;
  FeatureVector Features(const Image& img) const;

 protected:
  virtual std::vector<FeatureVector> Compute(std::span<const Image> batch) const = 0;
};

// Per-block, per-channel mean over a grid x grid partition of the image,
// flattened block-major then channel, L2-normalized. Occluding a region
// perturbs only the blocks it touches.
class BlockMeanEncoder : public Encoder {
 public:
  explicit BlockMeanEncoder(int grid = 4, int input_size = 32, int channels = 3);

  EncoderKind kind() const override { return EncoderKind::kSyntheticClean; }
  std::size_t dim() const override {
    return static_cast<std::size_t>(grid_) * grid_ * channels_;
  }
  int input_size() const override { return input_size_; }
  int grid() const { return grid_; }
  int channels() const { return channels_; }

  // Block means before normalization.
  std::vector<double> BlockMeans(const Image& img) const;
  FeatureVector Embed(const Image& img) const;

 protected:
  std::vector<FeatureVector> Compute(std::span<const Image> batch) const override;

 private:
  int grid_;
  int input_size_;
  int channels_;
};

// Returns the same vector for every input.
class ConstantEncoder : public Encoder {
 public:
  ConstantEncoder(FeatureVector value, int input_size)
      : value_(std::move(value)), input_size_(input_size) {}

  EncoderKind kind() const override { return EncoderKind::kConstant; }
  std::size_t dim() const override { return value_.dim(); }
  int input_size() const override { return input_size_; }

 protected:
  std::vector<FeatureVector> Compute(std::span<const Image> batch) const override {
    return std::vector<FeatureVector>(batch.size(), value_);
  }

 private:
  FeatureVector value_;
  int input_size_;
};

}  // namespace trojandec

#endif  // TROJANDEC_ENCODER_H_
