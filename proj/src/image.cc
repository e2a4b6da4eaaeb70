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

#include "trojandec/image.h"

#include <string>
#include <utility>

#include "trojandec/error.h"

namespace trojandec {
namespace {

void CheckDims(int height, int width, int channels) {
  if (height < 1 || width < 1 || (channels != 1 && channels != 3)) {
    throw Error(ErrorCode::kInvalidImage,
                "bad dimensions " + std::to_string(height) + "x" +
                    std::to_string(width) + "x" + std::to_string(channels));
  }
}

}  // namespace

Image::Image(int height, int width, int channels, uint8_t fill)
    : height_(height), width_(width), channels_(channels) {
  CheckDims(height, width, channels);
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

Image::Image(int height, int width, int channels, std::vector<uint8_t> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  CheckDims(height, width, channels);
  if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw Error(ErrorCode::kInvalidImage,
                "data length " + std::to_string(data_.size()) +
                    " does not match geometry");
  }
}

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedPng: return "MalformedPng";
    case ErrorCode::kUnsupportedPngVariant: return "UnsupportedPngVariant";
    case ErrorCode::kInvalidImage: return "InvalidImage";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kInvalidGeometry: return "InvalidGeometry";
    case ErrorCode::kGeometryMismatch: return "GeometryMismatch";
    case ErrorCode::kServiceUnreachable: return "ServiceUnreachable";
    case ErrorCode::kServiceError: return "ServiceError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kDegenerateRange: return "DegenerateRange";
    case ErrorCode::kNotTrojaned: return "NotTrojaned";
    case ErrorCode::kMaskCoversEverything: return "MaskCoversEverything";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kMissingCentroid: return "MissingCentroid";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace trojandec
