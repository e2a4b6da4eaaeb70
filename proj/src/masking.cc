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

#include "trojandec/masking.h"

#include <algorithm>
#include <cstring>
#include <string>

#include "json.hpp"
#include "trojandec/error.h"

namespace trojandec {
namespace {

void CheckMaskTarget(const Image& img, const Mask& mask) {
  if (img.height() != mask.image_size || img.width() != mask.image_size ||
      img.channels() != mask.channels) {
    throw Error(ErrorCode::kGeometryMismatch,
                "image " + std::to_string(img.height()) + "x" +
                    std::to_string(img.width()) + "x" +
                    std::to_string(img.channels()) + " vs mask for t=" +
                    std::to_string(mask.image_size));
  }
}

}  // namespace

Mask CreateMask(int a, int b, int k, int t, int channels, Rng& rng) {
  if (k < 1 || t < 1 || (channels != 1 && channels != 3)) {
    throw Error(ErrorCode::kInvalidGeometry, "k and t must be >= 1");
  }
  if (a < 0 || b < 0 || a + k > t || b + k > t) {
    throw Error(ErrorCode::kOutOfBounds,
                "mask (" + std::to_string(a) + "," + std::to_string(b) +
                    ",k=" + std::to_string(k) + ") exceeds t=" +
                    std::to_string(t));
  }
  Mask mask{a, b, k, t, channels, {}};
  mask.pattern.resize(static_cast<std::size_t>(k) * k * channels);
  rng.FillBytes(mask.pattern.begin(), mask.pattern.end());
  return mask;
}

MaskSet::MaskSet(int k, int s, int t, int channels, uint64_t seed)
    : k_(k), s_(s), t_(t), channels_(channels), seed_(seed) {
  if (k < 1 || s < 1 || t < 1 || k > t) {
    throw Error(ErrorCode::kInvalidGeometry,
                "need 1 <= k <= t and s >= 1 (k=" + std::to_string(k) +
                    ", s=" + std::to_string(s) + ", t=" + std::to_string(t) + ")");
  }
  const int per_axis = PositionsPerAxis(k, s, t);
  masks_.reserve(static_cast<std::size_t>(per_axis) * per_axis);
  uint64_t index = 0;
  for (int a = 0; a + k <= t; a += s) {
    for (int b = 0; b + k <= t; b += s) {
      Rng rng(DeriveSeed(seed, {index}));
      masks_.push_back(CreateMask(a, b, k, t, channels, rng));
      ++index;
    }
  }
}

std::string MaskSet::ToJson() const {
  nlohmann::json j = {{"k", k_}, {"s", s_}, {"t", t_},
                      {"channels", channels_}, {"seed", seed_}};
  return j.dump();
}

MaskSet MaskSet::FromJson(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    return MaskSet(j.at("k").get<int>(), j.at("s").get<int>(),
                   j.at("t").get<int>(), j.value("channels", 3),
                   j.value("seed", uint64_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("mask set: ") + e.what());
  }
}

Image ApplyMask(const Image& img, const Mask& mask) {
  CheckMaskTarget(img, mask);
  Image out = img;
  auto dst = out.mutable_data();
  const std::size_t run = static_cast<std::size_t>(mask.k) * mask.channels;
  for (int r = 0; r < mask.k; ++r) {
    std::memcpy(dst.data() + out.index(mask.a + r, mask.b),
                mask.pattern.data() + r * run, run);
  }
  return out;
}

Image ZeroMasked(const Image& img, const Mask& mask) {
  if (img.height() != mask.image_size || img.width() != mask.image_size) {
    throw Error(ErrorCode::kGeometryMismatch, "image does not match mask size");
  }
  Image out = img;
  auto dst = out.mutable_data();
  const std::size_t run = static_cast<std::size_t>(mask.k) * img.channels();
  for (int r = 0; r < mask.k; ++r) {
    std::fill_n(dst.data() + out.index(mask.a + r, mask.b), run, uint8_t{0});
  }
  return out;
}

Image BinaryMaskImage(const Mask& mask) {
  Image out(mask.image_size, mask.image_size, 1, 255);
  for (int r = mask.a; r < mask.a + mask.k; ++r) {
    for (int c = mask.b; c < mask.b + mask.k; ++c) out.at(r, c) = 0;
  }
  return out;
}

}  // namespace trojandec
