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

#include "stub_service.h"

#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "trojandec/base64.h"
#include "trojandec/png_codec.h"
#include "trojandec/restoration.h"

namespace trojandec::testing {
namespace {

using nlohmann::json;

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

Image DecodeField(const json& j, const char* key) {
  return DecodePng(Base64Decode(j.at(key).get<std::string>()));
}

}  // namespace

StubService::StubService(const Encoder& encoder, StubOptions options)
    : encoder_(encoder),
      options_(options),
      server_(std::make_unique<httplib::Server>()),
      failures_left_(options.fail_first) {
  server_->Get("/v1/info", [this](const httplib::Request&, httplib::Response& res) {
    if (ShouldFail()) return Reply(res, 503, {{"error", "warming up"}});
    Reply(res, 200,
          {{"feature_dim", options_.advertised_dim ? options_.advertised_dim : encoder_.dim()},
           {"input_size", encoder_.input_size()},
           {"model_name", "stub"}});
  });

  server_->Post("/v1/features", [this](const httplib::Request& req, httplib::Response& res) {
    ++feature_requests_;
    if (ShouldFail()) return Reply(res, 503, {{"error", "busy"}});
    std::vector<Image> images;
    try {
      const json body = json::parse(req.body);
      for (const auto& item : body.at("images")) {
        images.push_back(DecodePng(Base64Decode(item.get<std::string>())));
      }
    } catch (const std::exception& e) {
      return Reply(res, 400, {{"error", e.what()}});
    }
    if (images.empty()) return Reply(res, 400, {{"error", "no images"}});
    if (options_.max_batch && images.size() > options_.max_batch) {
      return Reply(res, 413, {{"error", "batch too large"}});
    }
    for (const auto& img : images) {
      if (img.height() != encoder_.input_size() || img.width() != encoder_.input_size()) {
        return Reply(res, 422, {{"error", "wrong image size"}});
      }
    }
    json features = json::array();
    for (const auto& f : encoder_.Features(images)) {
      std::vector<double> v = f.values;
      for (double& x : v) x *= options_.feature_scale;
      features.push_back(v);
    }
    if (options_.drop_feature && !features.empty()) features.erase(features.end() - 1);
    Reply(res, 200, {{"features", features}});
  });

  server_->Post("/v1/restore", [this](const httplib::Request& req, httplib::Response& res) {
    ++restore_requests_;
    if (ShouldFail()) return Reply(res, 503, {{"error", "busy"}});
    Image degraded, mask;
    try {
      const json j = json::parse(req.body);
      degraded = DecodeField(j, "image");
      mask = DecodeField(j, "mask");
    } catch (const std::exception& e) {
      return Reply(res, 400, {{"error", e.what()}});
    }
    if (degraded.height() != mask.height() || degraded.width() != mask.width()) {
      return Reply(res, 400, {{"error", "mask geometry differs from image"}});
    }
    for (uint8_t v : mask.data()) {
      if (v != 0 && v != 255) return Reply(res, 422, {{"error", "mask is not binary"}});
    }
    Image out = degraded;
    switch (options_.restore_mode) {
      case RestoreMode::kEcho:
        break;
      case RestoreMode::kDrifting: {
        auto d = out.mutable_data();
        for (auto& v : d) v = static_cast<uint8_t>(v ^ 0x2a);
        break;
      }
      case RestoreMode::kHarmonic:
        try {
          out = InpaintHarmonic({degraded, mask, RestoreStrategy::kHarmonic}).image;
        } catch (const std::exception& e) {
          return Reply(res, 422, {{"error", e.what()}});
        }
        break;
    }
    Reply(res, 200, {{"image", Base64Encode(EncodePng(out))}});
  });

  port_ = server_->bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

StubService::~StubService() {
  server_->stop();
  thread_.join();
}

std::string StubService::endpoint() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

bool StubService::ShouldFail() {
  int left = failures_left_.load();
  while (left > 0) {
    if (failures_left_.compare_exchange_weak(left, left - 1)) return true;
  }
  return false;
}

}  // namespace trojandec::testing
