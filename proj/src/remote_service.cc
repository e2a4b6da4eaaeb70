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

#include "trojandec/remote_service.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "trojandec/base64.h"
#include "trojandec/error.h"
#include "trojandec/png_codec.h"

namespace trojandec {
namespace {

using nlohmann::json;

bool Retryable(const httplib::Result& res) {
  return !res || res->status >= 500;
}

json ParseBody(const std::string& body, const std::string& path) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kServiceError, path + ": malformed JSON response");
  }
}

}  // namespace

ModelServiceClient::ModelServiceClient(std::string endpoint, ClientOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
  if (endpoint_.empty()) throw Error(ErrorCode::kInvalidConfig, "empty endpoint");
  if (options_.batch_size == 0 || options_.max_attempts < 1) {
    throw Error(ErrorCode::kInvalidConfig, "batch_size and max_attempts must be >= 1");
  }
}

std::string ModelServiceClient::Call(const std::string& method,
                                     const std::string& path,
                                     const std::string& body) const {
  // One client per call keeps concurrent use free of shared socket state.
  httplib::Client cli(endpoint_);
  if (!cli.is_valid()) {
    throw Error(ErrorCode::kInvalidConfig, "bad endpoint URL " + endpoint_);
  }
  cli.set_connection_timeout(std::chrono::seconds(5));
  cli.set_read_timeout(options_.timeout);
  cli.set_write_timeout(options_.timeout);

  auto backoff = options_.initial_backoff;
  std::string last_failure;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    httplib::Result res = method == "GET"
                              ? cli.Get(path)
                              : cli.Post(path, body, "application/json");
    if (!Retryable(res)) {
      if (res->status / 100 != 2) {
        throw Error(ErrorCode::kServiceError,
                    path + " returned HTTP " + std::to_string(res->status) +
                        ": " + res->body.substr(0, 200));
      }
      return res->body;
    }
    last_failure = res ? "HTTP " + std::to_string(res->status)
                       : httplib::to_string(res.error());
    if (attempt < options_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw Error(ErrorCode::kServiceUnreachable,
              endpoint_ + path + " after " + std::to_string(options_.max_attempts) +
                  " attempts: " + last_failure);
}

ServiceInfo ModelServiceClient::Info() const {
  const json j = ParseBody(Call("GET", "/v1/info", ""), "/v1/info");
  try {
    ServiceInfo info;
    info.feature_dim = j.at("feature_dim").get<std::size_t>();
    info.input_size = j.at("input_size").get<int>();
    info.model_name = j.value("model_name", "");
    return info;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kServiceError, std::string("/v1/info: ") + e.what());
  }
}

std::vector<std::vector<double>> ModelServiceClient::Features(
    std::span<const Image> batch) const {
  std::vector<std::vector<double>> out;
  out.reserve(batch.size());
  for (std::size_t start = 0; start < batch.size(); start += options_.batch_size) {
    const std::size_t n = std::min(options_.batch_size, batch.size() - start);
    json request = {{"images", json::array()}};
    for (std::size_t i = start; i < start + n; ++i) {
      request["images"].push_back(Base64Encode(EncodePng(batch[i])));
    }
    const json j = ParseBody(Call("POST", "/v1/features", request.dump()),
                             "/v1/features");
    try {
      const auto& features = j.at("features");
      if (!features.is_array() || features.size() != n) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "/v1/features returned " + std::to_string(features.size()) +
                        " vectors for " + std::to_string(n) + " images");
      }
      for (const auto& f : features) out.push_back(f.get<std::vector<double>>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kServiceError, std::string("/v1/features: ") + e.what());
    }
  }
  return out;
}

Image ModelServiceClient::Restore(const Image& degraded, const Image& binary_mask) const {
  const json request = {{"image", Base64Encode(EncodePng(degraded))},
                        {"mask", Base64Encode(EncodePng(binary_mask))}};
  const json j = ParseBody(Call("POST", "/v1/restore", request.dump()), "/v1/restore");
  std::string encoded;
  try {
    encoded = j.at("image").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kServiceError, std::string("/v1/restore: ") + e.what());
  }
  try {
    return DecodePng(Base64Decode(encoded));
  } catch (const Error& e) {
    throw Error(ErrorCode::kServiceError,
                std::string("/v1/restore returned an undecodable image: ") + e.what());
  }
}

RemoteEncoder::RemoteEncoder(std::string endpoint, ClientOptions options)
    : client_(std::move(endpoint), options) {}

const ServiceInfo& RemoteEncoder::info() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!info_) info_ = client_.Info();
  return *info_;
}

std::size_t RemoteEncoder::dim() const { return info().feature_dim; }

int RemoteEncoder::input_size() const { return info().input_size; }

std::vector<FeatureVector> RemoteEncoder::Compute(std::span<const Image> batch) const {
  auto raw = client_.Features(batch);
  std::vector<FeatureVector> out;
  out.reserve(raw.size());
  for (auto& v : raw) {
    for (double x : v) {
      if (!std::isfinite(x)) {
        throw Error(ErrorCode::kServiceError, "/v1/features returned a non-finite value");
      }
    }
    out.push_back(FeatureVector{std::move(v)});
  }
  return out;
}

}  // namespace trojandec
