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

#include "trojandec/restoration.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "trojandec/error.h"

namespace trojandec {
namespace {

void CheckRequestGeometry(const Image& degraded, const Image& mask) {
  if (mask.channels() != 1 || mask.height() != degraded.height() ||
      mask.width() != degraded.width()) {
    throw Error(ErrorCode::kGeometryMismatch,
                "mask must be single-channel with the image's height and width");
  }
}

// Mirror across the border pixel: -1 -> 1, n -> n - 2.
inline int Reflect(int i, int n) {
  if (n == 1) return 0;
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

// Transfinite start: average of the linear interpolants between the nearest
// known pixels along the row and along the column. Pixels with no known
// pixel in either direction start at the mean of all known values.
void InitialGuess(const std::vector<double>& plane, const std::vector<bool>& known,
                  int h, int w, double fallback, std::vector<double>& out) {
  out = plane;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int idx = r * w + c;
      if (known[idx]) continue;
      double sum = 0.0;
      int terms = 0;

      int left = c - 1;
      while (left >= 0 && !known[r * w + left]) --left;
      int right = c + 1;
      while (right < w && !known[r * w + right]) ++right;
      if (left >= 0 && right < w) {
        const double f = static_cast<double>(c - left) / (right - left);
        sum += (1.0 - f) * plane[r * w + left] + f * plane[r * w + right];
        ++terms;
      } else if (left >= 0 || right < w) {
        sum += plane[r * w + (left >= 0 ? left : right)];
        ++terms;
      }

      int up = r - 1;
      while (up >= 0 && !known[up * w + c]) --up;
      int down = r + 1;
      while (down < h && !known[down * w + c]) ++down;
      if (up >= 0 && down < h) {
        const double f = static_cast<double>(r - up) / (down - up);
        sum += (1.0 - f) * plane[up * w + c] + f * plane[down * w + c];
        ++terms;
      } else if (up >= 0 || down < h) {
        sum += plane[(up >= 0 ? up : down) * w + c];
        ++terms;
      }
      out[idx] = terms > 0 ? sum / terms : fallback;
    }
  }
}

}  // namespace

std::string_view RestoreStrategyName(RestoreStrategy strategy) {
  return strategy == RestoreStrategy::kHarmonic ? "harmonic" : "diffusion";
}

RestoreStrategy ParseRestoreStrategy(std::string_view name) {
  if (name == "harmonic") return RestoreStrategy::kHarmonic;
  if (name == "diffusion" || name == "remote-diffusion") {
    return RestoreStrategy::kRemoteDiffusion;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown strategy " + std::string(name));
}

Prototype SelectPrototype(const DetectionVerdict& verdict, const MaskSet& masks,
                          const Image& img) {
  if (!verdict.is_trojaned) {
    throw Error(ErrorCode::kNotTrojaned, "prototype requested for a clean verdict");
  }
  if (verdict.argmin_index >= masks.size()) {
    throw Error(ErrorCode::kOutOfBounds, "argmin index outside the mask set");
  }
  const Mask& mask = masks[verdict.argmin_index];
  return Prototype{ZeroMasked(img, mask), mask, verdict.argmin_index};
}

RestorationRequest MakeRequest(const Prototype& prototype, RestoreStrategy strategy) {
  return RestorationRequest{prototype.degraded, BinaryMaskImage(prototype.mask), strategy};
}

Image EnforceKnownPixels(const Image& candidate, const Image& known, const Image& mask) {
  if (!candidate.SameGeometry(known)) {
    throw Error(ErrorCode::kGeometryMismatch, "restored image geometry differs from input");
  }
  CheckRequestGeometry(known, mask);
  Image out = candidate;
  for (int r = 0; r < known.height(); ++r) {
    for (int c = 0; c < known.width(); ++c) {
      if (mask.at(r, c) == 0) continue;
      for (int ch = 0; ch < known.channels(); ++ch) out.at(r, c, ch) = known.at(r, c, ch);
    }
  }
  return out;
}

RestoredImage InpaintHarmonic(const RestorationRequest& request,
                              const HarmonicOptions& options) {
  const Image& src = request.degraded;
  CheckRequestGeometry(src, request.mask);
  const int h = src.height();
  const int w = src.width();

  std::vector<bool> known(static_cast<std::size_t>(h) * w);
  std::vector<int> unknown;
  int min_r = h, min_c = w, max_r = -1, max_c = -1;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const bool k = request.mask.at(r, c) != 0;
      known[r * w + c] = k;
      if (!k) {
        unknown.push_back(r * w + c);
        min_r = std::min(min_r, r);
        max_r = std::max(max_r, r);
        min_c = std::min(min_c, c);
        max_c = std::max(max_c, c);
      }
    }
  }
  if (unknown.size() == known.size()) {
    throw Error(ErrorCode::kMaskCoversEverything, "no known pixels to extend");
  }

  RestoredImage result{src, RestoreStrategy::kHarmonic, std::nullopt};
  if (unknown.empty()) return result;
  if (max_r - min_r == max_c - min_c) {
    result.mask_ref = MaskRegion{min_r, min_c, max_r - min_r + 1};
  }

  std::vector<double> plane(known.size());
  std::vector<double> u;
  for (int ch = 0; ch < src.channels(); ++ch) {
    double known_sum = 0.0;
    for (int i = 0; i < h * w; ++i) {
      plane[i] = src.at(i / w, i % w, ch);
      if (known[i]) known_sum += plane[i];
    }
    const double fallback = known_sum / static_cast<double>(known.size() - unknown.size());
    InitialGuess(plane, known, h, w, fallback, u);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
      double max_change = 0.0;
      for (int idx : unknown) {
        const int r = idx / w;
        const int c = idx % w;
        const double avg = 0.25 * (u[Reflect(r - 1, h) * w + c] + u[Reflect(r + 1, h) * w + c] +
                                   u[r * w + Reflect(c - 1, w)] + u[r * w + Reflect(c + 1, w)]);
        max_change = std::max(max_change, std::abs(avg - u[idx]));
        u[idx] = avg;
      }
      if (max_change < options.tolerance) break;
    }
    for (int idx : unknown) result.image.at(idx / w, idx % w, ch) = RoundToPixel(u[idx]);
  }
  return result;
}

RestoredImage RestoreRemote(const RestorationRequest& request,
                            const ModelServiceClient& client) {
  CheckRequestGeometry(request.degraded, request.mask);
  const Image response = client.Restore(request.degraded, request.mask);
  if (!response.SameGeometry(request.degraded)) {
    throw Error(ErrorCode::kGeometryMismatch, "/v1/restore returned a different geometry");
  }
  RestoredImage result{EnforceKnownPixels(response, request.degraded, request.mask),
                       RestoreStrategy::kRemoteDiffusion, std::nullopt};
  int min_r = request.mask.height(), min_c = request.mask.width(), max_r = -1, max_c = -1;
  for (int r = 0; r < request.mask.height(); ++r) {
    for (int c = 0; c < request.mask.width(); ++c) {
      if (request.mask.at(r, c) != 0) continue;
      min_r = std::min(min_r, r);
      max_r = std::max(max_r, r);
      min_c = std::min(min_c, c);
      max_c = std::max(max_c, c);
    }
  }
  if (max_r >= 0 && max_r - min_r == max_c - min_c) {
    result.mask_ref = MaskRegion{min_r, min_c, max_r - min_r + 1};
  }
  return result;
}

RestoredImage Restore(const Image& img, const DetectionVerdict& verdict,
                      const MaskSet& masks, const RestoreConfig& cfg) {
  if (!verdict.is_trojaned) return RestoredImage{img, cfg.strategy, std::nullopt};
  const Prototype prototype = SelectPrototype(verdict, masks, img);
  const RestorationRequest request = MakeRequest(prototype, cfg.strategy);
  RestoredImage out;
  if (cfg.strategy == RestoreStrategy::kHarmonic) {
    out = InpaintHarmonic(request, cfg.harmonic);
  } else {
    if (cfg.endpoint.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "diffusion strategy needs an endpoint");
    }
    out = RestoreRemote(request, ModelServiceClient(cfg.endpoint, cfg.client_options));
  }
  out.mask_ref = MaskRegion{prototype.mask.a, prototype.mask.b, prototype.mask.k};
  return out;
}

}  // namespace trojandec
