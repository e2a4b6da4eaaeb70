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

#ifndef TROJANDEC_PNG_CODEC_H_
#define TROJANDEC_PNG_CODEC_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "trojandec/image.h"

namespace trojandec {

// Decodes an 8-bit grayscale or RGB PNG. Palette images without
// transparency are expanded to RGB. Alpha channels, 16-bit samples, and
// sub-byte grayscale are rejected with kUnsupportedPngVariant; anything that
// is not a valid PNG stream fails with kMalformedPng.
Image DecodePng(std::span<const uint8_t> bytes);

// Lossless encoding; DecodePng(EncodePng(img)) == img.
std::vector<uint8_t> EncodePng(const Image& img);

Image ReadPng(const std::filesystem::path& path);
void WritePng(const std::filesystem::path& path, const Image& img);

std::vector<uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const uint8_t> bytes);

}  // namespace trojandec

#endif  // TROJANDEC_PNG_CODEC_H_
