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

#ifndef TROJANDEC_BASE64_H_
#define TROJANDEC_BASE64_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trojandec {

// RFC 4648 standard alphabet with '=' padding.
std::string Base64Encode(std::span<const uint8_t> bytes);

// Throws kInvalidConfig on characters outside the alphabet or bad padding.
std::vector<uint8_t> Base64Decode(std::string_view text);

}  // namespace trojandec

#endif  // TROJANDEC_BASE64_H_
