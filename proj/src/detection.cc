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

#include "trojandec/detection.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "trojandec/error.h"
#include "trojandec/rng.h"
#include "trojandec/simd/kernels.h"

namespace trojandec {
namespace {

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double Dispersion(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return simd::CenteredSumSquares(v, Mean(v));
}

// Best threshold split of already-sorted values. Returns the size of the
// lower cluster. Prefix sums are taken on mean-centered values to limit
// cancellation.
std::size_t BestSplit(std::span<const double> sorted) {
  const std::size_t n = sorted.size();
  const double center = Mean(sorted);
  double total = 0.0;
  double total_sq = 0.0;
  for (double x : sorted) {
    const double d = x - center;
    total += d;
    total_sq += d * d;
  }
  double left = 0.0;
  double left_sq = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_split = 1;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = sorted[i - 1] - center;
    left += d;
    left_sq += d * d;
    const double nl = static_cast<double>(i);
    const double nr = static_cast<double>(n - i);
    const double right = total - left;
    const double right_sq = total_sq - left_sq;
    const double cost = (left_sq - left * left / nl) + (right_sq - right * right / nr);
    if (cost < best) {
      best = cost;
      best_split = i;
    }
  }
  return best_split;
}

double TwoMeansDispersion(std::vector<double>& scratch) {
  std::sort(scratch.begin(), scratch.end());
  const std::size_t split = BestSplit(scratch);
  const std::span<const double> all(scratch);
  return Dispersion(all.first(split)) + Dispersion(all.subspan(split));
}

}  // namespace

KMeansResult KMeans1D(std::span<const double> values, int k) {
  if (k != 1 && k != 2) {
    throw Error(ErrorCode::kInvalidConfig, "KMeans1D supports K = 1 or 2");
  }
  if (values.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kTooFewPoints,
                std::to_string(values.size()) + " values for K=" + std::to_string(k));
  }
  KMeansResult result;
  if (k == 1) {
    result.assignment.assign(values.size(), 0);
    result.dispersion = Dispersion(values);
    result.split = values.size();
    return result;
  }

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> sorted(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = values[order[i]];

  const std::size_t split = BestSplit(sorted);
  const std::span<const double> all(sorted);
  result.dispersion = Dispersion(all.first(split)) + Dispersion(all.subspan(split));
  result.split = split;
  result.assignment.assign(values.size(), 1);
  for (std::size_t i = 0; i < split; ++i) result.assignment[order[i]] = 0;
  return result;
}

GapTrace GapStatistic(std::span<const double> values, int b, uint64_t seed) {
  if (values.size() < 2) {
    throw Error(ErrorCode::kTooFewPoints, "gap statistic needs at least 2 values");
  }
  if (b < 1) throw Error(ErrorCode::kInvalidConfig, "B must be >= 1");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) {
    throw Error(ErrorCode::kDegenerateRange, "all values are equal");
  }

  GapTrace trace;
  trace.b = b;
  trace.seed = seed;
  std::vector<double> reference(values.size());
  std::vector<double> logs(b);
  for (int k = 1; k <= 2; ++k) {
    const double w = std::max(KMeans1D(values, k).dispersion, kLogFloor);
    for (int i = 0; i < b; ++i) {
      Rng rng(DeriveSeed(seed, {static_cast<uint64_t>(k), static_cast<uint64_t>(i)}));
      for (double& x : reference) x = rng.Uniform(lo, hi);
      const double w_ref = k == 1 ? Dispersion(reference) : TwoMeansDispersion(reference);
      logs[i] = std::log(std::max(w_ref, kLogFloor));
    }
    const double mean_log = Mean(logs);
    const double var = simd::CenteredSumSquares(logs, mean_log) / b;
    trace.w[k - 1] = w;
    trace.gap[k - 1] = mean_log - std::log(w);
    trace.s[k - 1] = std::sqrt(var);
    trace.s_prime[k - 1] = trace.s[k - 1] * std::sqrt(1.0 + 1.0 / b);
  }
  return trace;
}

int DecideK(const GapTrace& trace) {
  return trace.gap[0] >= trace.gap[1] - trace.s_prime[1] ? 1 : 2;
}

Metadata ExtractMetadata(const Image& img, const Encoder& enc, const MaskSet& masks,
                         std::size_t query_batch) {
  if (!img.is_square() || img.size() != masks.t() ||
      img.channels() != masks.channels()) {
    throw Error(ErrorCode::kGeometryMismatch,
                "image does not match the mask set (t=" + std::to_string(masks.t()) + ")");
  }
  if (img.size() != enc.input_size()) {
    throw Error(ErrorCode::kGeometryMismatch,
                "image size " + std::to_string(img.size()) + " but encoder expects " +
                    std::to_string(enc.input_size()));
  }
  query_batch = std::max<std::size_t>(query_batch, 1);

  const FeatureVector reference = enc.Features(img);
  Metadata metadata;
  metadata.sims.reserve(masks.size());
  std::vector<Image> chunk;
  chunk.reserve(std::min(query_batch, masks.size()));
  for (std::size_t start = 0; start < masks.size(); start += query_batch) {
    const std::size_t end = std::min(start + query_batch, masks.size());
    chunk.clear();
    for (std::size_t i = start; i < end; ++i) chunk.push_back(ApplyMask(img, masks[i]));
    for (const auto& f : enc.Features(chunk)) {
      metadata.sims.push_back(CosineSimilarity(f, reference));
    }
  }
  return metadata;
}

std::size_t ArgMin(std::span<const double> sims) {
  return static_cast<std::size_t>(std::min_element(sims.begin(), sims.end()) - sims.begin());
}

DetectionVerdict DecideFromMetadata(const Metadata& metadata, int b, uint64_t seed) {
  if (metadata.sims.empty()) throw Error(ErrorCode::kTooFewPoints, "empty metadata");
  DetectionVerdict verdict;
  verdict.argmin_index = ArgMin(metadata.sims);
  verdict.trace.b = b;
  verdict.trace.seed = seed;
  const auto [lo, hi] = std::minmax_element(metadata.sims.begin(), metadata.sims.end());
  if (metadata.sims.size() < 2 || *hi - *lo < kDegenerateRange) {
    verdict.degenerate = true;
    return verdict;
  }
  verdict.trace = GapStatistic(metadata.sims, b, seed);
  verdict.k_star = DecideK(verdict.trace);
  verdict.is_trojaned = verdict.k_star == 2;
  return verdict;
}

DetectionVerdict Detect(const Image& img, const Encoder& enc, const MaskSet& masks,
                        const DetectionConfig& cfg) {
  if (masks.k() != cfg.k || masks.s() != cfg.s) {
    throw Error(ErrorCode::kInvalidConfig, "mask set does not match detection config");
  }
  const Metadata metadata = ExtractMetadata(img, enc, masks, cfg.query_batch);
  return DecideFromMetadata(metadata, cfg.b, cfg.seed);
}

DetectionVerdict Detect(const Image& img, const Encoder& enc, const DetectionConfig& cfg) {
  if (!img.is_square()) {
    throw Error(ErrorCode::kGeometryMismatch, "detection needs a square image");
  }
  const MaskSet masks(cfg.k, cfg.s, img.size(), img.channels(), cfg.seed);
  return Detect(img, enc, masks, cfg);
}

nlohmann::json VerdictToJson(const DetectionVerdict& verdict) {
  const auto& t = verdict.trace;
  return {
      {"is_trojaned", verdict.is_trojaned},
      {"k_star", verdict.k_star},
      {"G", {t.gap[0], t.gap[1]}},
      {"s_prime", {t.s_prime[0], t.s_prime[1]}},
      {"W", {t.w[0], t.w[1]}},
      {"B", t.b},
      {"seed", t.seed},
      {"degenerate", verdict.degenerate},
      {"argmin_index", verdict.argmin_index},
  };
}

}  // namespace trojandec
