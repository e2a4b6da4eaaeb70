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

#ifndef TROJANDEC_ERROR_H_
#define TROJANDEC_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace trojandec {

enum class ErrorCode {
  kMalformedPng,
  kUnsupportedPngVariant,
  kInvalidImage,
  kOutOfBounds,
  kInvalidGeometry,
  kGeometryMismatch,
  kServiceUnreachable,
  kServiceError,
  kDimensionMismatch,
  kEmptyBatch,
  kZeroVector,
  kTooFewPoints,
  kDegenerateRange,
  kNotTrojaned,
  kMaskCoversEverything,
  kEmptyCorpus,
  kMissingCentroid,
  kInvalidConfig,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

  // Transport-level failures talking to a remote model service.
  bool is_service_error() const {
    return code_ == ErrorCode::kServiceUnreachable ||
           code_ == ErrorCode::kServiceError;
  }

 private:
  ErrorCode code_;
};

}  // namespace trojandec

#endif  // TROJANDEC_ERROR_H_
