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

#ifndef TROJANDEC_DETECTION_H_
#define TROJANDEC_DETECTION_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "trojandec/encoder.h"
#include "trojandec/image.h"
#include "trojandec/masking.h"

namespace trojandec {

// Cosine similarity between f(masked_i) and f(x), index-aligned with the
// mask set that produced it.
struct Metadata {
  std::vector<double> sims;
};

struct KMeansResult {
  // Cluster id per input value (input order). For K=2, cluster 0 holds the
  // smaller values.
  std::vector<int> assignment;
  // Within-cluster sum of squared deviations from the cluster means.
  double dispersion = 0.0;
  // Size of cluster 0 (equals n for K=1).
  std::size_t split = 0;
};

// Exact 1-D K-means for K in {1, 2}. K=2 scans every threshold split of the
// sorted values and keeps the minimum dispersion, ties going to the smallest
// split. Throws kTooFewPoints when values.size() < K and kInvalidConfig for
// other K.
KMeansResult KMeans1D(std::span<const double> values, int k);

// Floor applied to every dispersion before taking its log.
inline constexpr double kLogFloor = 1e-12;
// Metadata spread below this is treated as a single cluster outright.
inline constexpr double kDegenerateRange = 1e-6;

struct GapTrace {
  std::array<double, 2> w{};        // W_K for K = 1, 2
  std::array<double, 2> gap{};      // G(K)
  std::array<double, 2> s{};        // std dev of log W*_Kb over b
  std::array<double, 2> s_prime{};  // s_K * sqrt(1 + 1/B)
  int b = 0;
  uint64_t seed = 0;
};

// Gap statistic for K in {1, 2} against B reference sets drawn uniformly on
// [min(values), max(values)]. Reference set (K, b) comes from its own stream
// seeded by (seed, K, b). Throws kTooFewPoints for fewer than 2 values,
// kInvalidConfig for B < 1, and kDegenerateRange when all values are equal.
GapTrace GapStatistic(std::span<const double> values, int b, uint64_t seed);

// Smallest K with G(K) >= G(K+1) - s'_{K+1}, restricted to K in {1, 2}.
int DecideK(const GapTrace& trace);

struct DetectionConfig {
  int k = 15;    // mask side length
  int s = 1;     // mask stride
  int b = 100;   // gap-statistic reference sets
  uint64_t seed = 0;
  // Masked images per encoder request.
  std::size_t query_batch = 64;
};

struct DetectionVerdict {
  bool is_trojaned = false;
  int k_star = 1;
  GapTrace trace;
  std::size_t argmin_index = 0;
  // Metadata range fell below kDegenerateRange; trace is left zeroed.
  bool degenerate = false;
};

// sims[i] = cos(f(apply_mask(img, masks[i])), f(img)). f(img) is queried
// exactly once; masked images are sent in batches of query_batch.
Metadata ExtractMetadata(const Image& img, const Encoder& enc, const MaskSet& masks,
                         std::size_t query_batch = 64);

// Index of the smallest similarity, lowest index on ties.
std::size_t ArgMin(std::span<const double> sims);

DetectionVerdict DecideFromMetadata(const Metadata& metadata, int b, uint64_t seed);

// Full detection for one image. The image must be square with side
// enc.input_size(); the mask set is generated from cfg.
DetectionVerdict Detect(const Image& img, const Encoder& enc, const DetectionConfig& cfg);

// Same, reusing a prebuilt mask set (must match cfg.k, cfg.s and the image).
DetectionVerdict Detect(const Image& img, const Encoder& enc, const MaskSet& masks,
                        const DetectionConfig& cfg);

// {"is_trojaned", "k_star", "G", "s_prime", "argmin_index"} plus W, B, seed.
nlohmann::json VerdictToJson(const DetectionVerdict& verdict);

}  // namespace trojandec

#endif  // TROJANDEC_DETECTION_H_
