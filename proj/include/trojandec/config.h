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

#ifndef TROJANDEC_CONFIG_H_
#define TROJANDEC_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "trojandec/attack_sim.h"
#include "trojandec/detection.h"
#include "trojandec/encoder.h"
#include "trojandec/remote_service.h"

namespace trojandec {

// Everything needed to build an encoder. Synthetic encoders are fully
// determined by these fields plus the run seed.
struct EncoderSpec {
  EncoderKind kind = EncoderKind::kSyntheticClean;
  std::string endpoint;  // kRemote
  ClientOptions client_options;

  int grid = 4;
  int input_size = 32;
  int channels = 3;

  // kSyntheticTrojaned: trigger loaded from trigger_path when set, otherwise
  // drawn from the run seed with the given size.
  std::string trigger_path;
  int trigger_height = 10;
  int trigger_width = 10;
  double tau = 0.0;
  // Trojan target vector; DefaultTarget from the run seed when unset.
  std::optional<FeatureVector> target;

  double constant = 1.0;  // kConstant
};

struct RunConfig {
  DetectionConfig detection;
  EncoderSpec encoder;
};

EncoderKind ParseEncoderKind(std::string_view name);

// {k, s, B, seed, encoder: {kind, endpoint | params}}. Missing fields keep
// their defaults; malformed ones throw kInvalidConfig.
RunConfig RunConfigFromJson(const nlohmann::json& j);
nlohmann::json RunConfigToJson(const RunConfig& cfg);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Trigger implied by spec and run seed (kSyntheticTrojaned only).
Trigger TriggerFor(const EncoderSpec& spec, uint64_t seed);

std::unique_ptr<Encoder> MakeEncoder(const EncoderSpec& spec, uint64_t seed);

}  // namespace trojandec

#endif  // TROJANDEC_CONFIG_H_
