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

#ifndef TROJANDEC_RESTORATION_H_
#define TROJANDEC_RESTORATION_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "trojandec/detection.h"
#include "trojandec/image.h"
#include "trojandec/masking.h"
#include "trojandec/remote_service.h"

namespace trojandec {

enum class RestoreStrategy { kHarmonic, kRemoteDiffusion };

std::string_view RestoreStrategyName(RestoreStrategy strategy);
// Accepts "harmonic" and "diffusion" (alias "remote-diffusion").
RestoreStrategy ParseRestoreStrategy(std::string_view name);

// degraded = m * x (masked square zeroed); mask is the single-channel binary
// image of m (0 = unknown, 255 = known).
struct RestorationRequest {
  Image degraded;
  Image mask;
  RestoreStrategy strategy = RestoreStrategy::kHarmonic;
};

struct MaskRegion {
  int a = 0;
  int b = 0;
  int k = 0;
};

struct RestoredImage {
  Image image;
  RestoreStrategy strategy_used = RestoreStrategy::kHarmonic;
  // Square that was synthesized; empty when the input passed through.
  std::optional<MaskRegion> mask_ref;
};

struct Prototype {
  Image degraded;
  Mask mask;
  std::size_t index = 0;
};

// Picks masks[verdict.argmin_index] and zeroes its square in img.
// Throws kNotTrojaned for a clean verdict.
Prototype SelectPrototype(const DetectionVerdict& verdict, const MaskSet& masks,
                          const Image& img);

RestorationRequest MakeRequest(const Prototype& prototype, RestoreStrategy strategy);

struct HarmonicOptions {
  // Stop once the largest per-sweep change (pixel units) drops below this.
  double tolerance = 1e-3;
  int max_iterations = 10000;
};

// Fills mask == 0 pixels with the discrete harmonic extension of the known
// pixels, per channel: Gauss-Seidel sweeps of 4-neighbour averaging with the
// known pixels as Dirichlet data and mirrored image borders. Known pixels are
// copied through bit-exact. Throws kMaskCoversEverything when nothing is
// known and kGeometryMismatch if degraded and mask disagree in size.
RestoredImage InpaintHarmonic(const RestorationRequest& request,
                              const HarmonicOptions& options = {});

// Delegates to the service's /v1/restore, then copies every known pixel of
// the request back over the response so that unmasked pixels always equal
// the input.
RestoredImage RestoreRemote(const RestorationRequest& request,
                            const ModelServiceClient& client);

// Overwrites every pixel with mask != 0 by the corresponding pixel of
// known. Throws kGeometryMismatch when the three images disagree.
Image EnforceKnownPixels(const Image& candidate, const Image& known, const Image& mask);

struct RestoreConfig {
  RestoreStrategy strategy = RestoreStrategy::kHarmonic;
  std::string endpoint;  // used by kRemoteDiffusion
  ClientOptions client_options;
  HarmonicOptions harmonic;
};

// Clean verdicts pass img through untouched; trojaned ones are restored from
// their minimum-similarity prototype with the configured inpainter.
RestoredImage Restore(const Image& img, const DetectionVerdict& verdict,
                      const MaskSet& masks, const RestoreConfig& cfg);

}  // namespace trojandec

#endif  // TROJANDEC_RESTORATION_H_
