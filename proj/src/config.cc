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

#include "trojandec/config.h"

#include <string>

#include "trojandec/error.h"
#include "trojandec/png_codec.h"
#include "trojandec/rng.h"

namespace trojandec {
namespace {

constexpr uint64_t kTriggerStream = 0x7219;
constexpr uint64_t kTargetStream = 0x7a26;

template <typename T>
void Read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kInvalidConfig, std::string("bad value for '") + key + "'");
  }
}

}  // namespace

EncoderKind ParseEncoderKind(std::string_view name) {
  for (auto kind : {EncoderKind::kRemote, EncoderKind::kSyntheticClean,
                    EncoderKind::kSyntheticTrojaned, EncoderKind::kConstant}) {
    if (EncoderKindName(kind) == name) return kind;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown encoder kind '" + std::string(name) + "'");
}

RunConfig RunConfigFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be an object");
  RunConfig cfg;
  Read(j, "k", cfg.detection.k);
  Read(j, "s", cfg.detection.s);
  Read(j, "B", cfg.detection.b);
  Read(j, "seed", cfg.detection.seed);
  if (j.contains("encoder")) {
    const auto& e = j.at("encoder");
    if (!e.is_object()) throw Error(ErrorCode::kInvalidConfig, "'encoder' must be an object");
    std::string kind = std::string(EncoderKindName(cfg.encoder.kind));
    Read(e, "kind", kind);
    cfg.encoder.kind = ParseEncoderKind(kind);
    Read(e, "endpoint", cfg.encoder.endpoint);
    if (e.contains("params")) {
      const auto& p = e.at("params");
      Read(p, "grid", cfg.encoder.grid);
      Read(p, "input_size", cfg.encoder.input_size);
      Read(p, "channels", cfg.encoder.channels);
      Read(p, "trigger", cfg.encoder.trigger_path);
      Read(p, "trigger_height", cfg.encoder.trigger_height);
      Read(p, "trigger_width", cfg.encoder.trigger_width);
      Read(p, "tau", cfg.encoder.tau);
      Read(p, "constant", cfg.encoder.constant);
    }
  }
  const auto& d = cfg.detection;
  if (d.k < 1 || d.s < 1 || d.b < 1) {
    throw Error(ErrorCode::kInvalidConfig, "k, s and B must be positive");
  }
  return cfg;
}

nlohmann::json RunConfigToJson(const RunConfig& cfg) {
  const auto& e = cfg.encoder;
  nlohmann::json encoder = {{"kind", std::string(EncoderKindName(e.kind))}};
  if (e.kind == EncoderKind::kRemote) {
    encoder["endpoint"] = e.endpoint;
  } else {
    nlohmann::json params = {
        {"grid", e.grid}, {"input_size", e.input_size}, {"channels", e.channels}};
    if (e.kind == EncoderKind::kSyntheticTrojaned) {
      params["trigger"] = e.trigger_path;
      params["trigger_height"] = e.trigger_height;
      params["trigger_width"] = e.trigger_width;
      params["tau"] = e.tau;
    }
    if (e.kind == EncoderKind::kConstant) params["constant"] = e.constant;
    encoder["params"] = std::move(params);
  }
  return {{"k", cfg.detection.k},
          {"s", cfg.detection.s},
          {"B", cfg.detection.b},
          {"seed", cfg.detection.seed},
          {"encoder", std::move(encoder)}};
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path);
  nlohmann::json j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::kInvalidConfig, path.string() + " is not valid JSON");
  }
  return RunConfigFromJson(j);
}

Trigger TriggerFor(const EncoderSpec& spec, uint64_t seed) {
  if (!spec.trigger_path.empty()) return LoadTrigger(spec.trigger_path);
  return RandomTrigger(spec.trigger_height, spec.trigger_width, spec.channels,
                       DeriveSeed(seed, {kTriggerStream}));
}

std::unique_ptr<Encoder> MakeEncoder(const EncoderSpec& spec, uint64_t seed) {
  switch (spec.kind) {
    case EncoderKind::kRemote:
      if (spec.endpoint.empty()) {
        throw Error(ErrorCode::kInvalidConfig, "remote encoder needs an endpoint");
      }
      return std::make_unique<RemoteEncoder>(spec.endpoint, spec.client_options);
    case EncoderKind::kSyntheticClean:
      return std::make_unique<BlockMeanEncoder>(spec.grid, spec.input_size, spec.channels);
    case EncoderKind::kSyntheticTrojaned: {
      BlockMeanEncoder base(spec.grid, spec.input_size, spec.channels);
      FeatureVector target = spec.target ? *spec.target
                                         : DefaultTarget(base.dim(),
                                                         DeriveSeed(seed, {kTargetStream}));
      return std::make_unique<SyntheticTrojanEncoder>(std::move(base), TriggerFor(spec, seed),
                                                      std::move(target), spec.tau);
    }
    case EncoderKind::kConstant:
      return std::make_unique<ConstantEncoder>(
          FeatureVector{std::vector<double>(
              static_cast<std::size_t>(spec.grid) * spec.grid * spec.channels, spec.constant)},
          spec.input_size);
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown encoder kind");
}

}  // namespace trojandec
