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

#ifndef TROJANDEC_RESIZE_H_
#define TROJANDEC_RESIZE_H_

#include "trojandec/image.h"

namespace trojandec {

// Bilinear resize to target x target with half-pixel-center alignment and
// edge clamping. Identity when the input is already target x target.
Image Resize(const Image& img, int target);

}  // namespace trojandec

#endif  // TROJANDEC_RESIZE_H_
