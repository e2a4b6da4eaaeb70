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

#include "trojandec/resize.h"

#include <algorithm>
#include <vector>

#include "trojandec/error.h"

namespace trojandec {
namespace {

struct Tap {
  int lo;
  int hi;
  double frac;
};

// Half-pixel-center source coordinate for each output sample, clamped to
// the valid sample range.
std::vector<Tap> Taps(int src, int dst) {
  std::vector<Tap> taps(dst);
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    double x = (i + 0.5) * scale - 0.5;
    x = std::clamp(x, 0.0, static_cast<double>(src - 1));
    const int lo = static_cast<int>(x);
    taps[i] = {lo, std::min(lo + 1, src - 1), x - lo};
  }
  return taps;
}

}  // namespace

Image Resize(const Image& img, int target) {
  if (target < 1) throw Error(ErrorCode::kInvalidGeometry, "target < 1");
  if (img.height() == target && img.width() == target) return img;

  const auto ty = Taps(img.height(), target);
  const auto tx = Taps(img.width(), target);
  const int c = img.channels();
  Image out(target, target, c);
  for (int r = 0; r < target; ++r) {
    for (int q = 0; q < target; ++q) {
      const double fy = ty[r].frac;
      const double fx = tx[q].frac;
      for (int ch = 0; ch < c; ++ch) {
        const double top = (1.0 - fx) * img.at(ty[r].lo, tx[q].lo, ch) +
                           fx * img.at(ty[r].lo, tx[q].hi, ch);
        const double bottom = (1.0 - fx) * img.at(ty[r].hi, tx[q].lo, ch) +
                              fx * img.at(ty[r].hi, tx[q].hi, ch);
        out.at(r, q, ch) = RoundToPixel((1.0 - fy) * top + fy * bottom);
      }
    }
  }
  return out;
}

}  // namespace trojandec
