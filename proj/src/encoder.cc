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

#include "trojandec/encoder.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "trojandec/error.h"
#include "trojandec/simd/kernels.h"

namespace trojandec {

double Norm(const FeatureVector& v) {
  return std::sqrt(simd::Dot(v.span(), v.span()));
}

FeatureVector Normalized(FeatureVector v) {
  const double n = Norm(v);
  if (n > 0.0) {
    for (double& x : v.values) x /= n;
  }
  return v;
}

double CosineSimilarity(const FeatureVector& u, const FeatureVector& v) {
  if (u.dim() != v.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(u.dim()) + " vs " + std::to_string(v.dim()));
  }
  const double uu = simd::Dot(u.span(), u.span());
  const double vv = simd::Dot(v.span(), v.span());
  if (uu == 0.0 || vv == 0.0) {
    throw Error(ErrorCode::kZeroVector, "cosine similarity of a zero vector");
  }
  const double cos = simd::Dot(u.span(), v.span()) / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(cos, -1.0, 1.0);
}

std::string_view EncoderKindName(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::kRemote: return "remote";
    case EncoderKind::kSyntheticClean: return "synthetic-clean";
    case EncoderKind::kSyntheticTrojaned: return "synthetic-trojaned";
    case EncoderKind::kConstant: return "constant";
  }
  return "unknown";
}

std::vector<FeatureVector> Encoder::Features(std::span<const Image> batch) const {
  if (batch.empty()) throw Error(ErrorCode::kEmptyBatch, "no images to encode");
  auto out = Compute(batch);
  if (out.size() != batch.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(batch.size()) + " vectors, got " +
                    std::to_string(out.size()));
  }
  const std::size_t d = dim();
  for (const auto& f : out) {
    if (f.dim() != d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "expected dim " + std::to_string(d) + ", got " +
                      std::to_string(f.dim()));
    }
  }
  return out;
}

FeatureVector Encoder::Features(const Image& img) const {
  return std::move(Features(std::span<const Image>(&img, 1)).front());
}

BlockMeanEncoder::BlockMeanEncoder(int grid, int input_size, int channels)
    : grid_(grid), input_size_(input_size), channels_(channels) {
  if (grid < 1 || input_size < grid || (channels != 1 && channels != 3)) {
    throw Error(ErrorCode::kInvalidConfig, "block-mean encoder: need 1 <= grid <= t");
  }
}

std::vector<double> BlockMeanEncoder::BlockMeans(const Image& img) const {
  if (img.height() != input_size_ || img.width() != input_size_ ||
      img.channels() != channels_) {
    throw Error(ErrorCode::kGeometryMismatch,
                "block-mean encoder expects " + std::to_string(input_size_) + "x" +
                    std::to_string(input_size_) + "x" + std::to_string(channels_));
  }
  const int t = input_size_;
  const int c = channels_;
  std::vector<double> means(dim());
  std::vector<uint32_t> column_sums(img.row_stride());
  for (int by = 0; by < grid_; ++by) {
    const int r0 = by * t / grid_;
    const int r1 = (by + 1) * t / grid_;
    std::fill(column_sums.begin(), column_sums.end(), 0u);
    for (int r = r0; r < r1; ++r) simd::AccumulateU8(img.row(r), column_sums);
    for (int bx = 0; bx < grid_; ++bx) {
      const int c0 = bx * t / grid_;
      const int c1 = (bx + 1) * t / grid_;
      const double count = static_cast<double>(r1 - r0) * (c1 - c0);
      for (int ch = 0; ch < c; ++ch) {
        uint64_t sum = 0;
        for (int col = c0; col < c1; ++col) sum += column_sums[col * c + ch];
        means[(by * grid_ + bx) * c + ch] = static_cast<double>(sum) / count;
      }
    }
  }
  return means;
}

FeatureVector BlockMeanEncoder::Embed(const Image& img) const {
  return Normalized(FeatureVector{BlockMeans(img)});
}

std::vector<FeatureVector> BlockMeanEncoder::Compute(std::span<const Image> batch) const {
  std::vector<FeatureVector> out;
  out.reserve(batch.size());
  for (const auto& img : batch) out.push_back(Embed(img));
  return out;
}

}  // namespace trojandec
