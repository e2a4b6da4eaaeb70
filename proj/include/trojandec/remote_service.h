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

#ifndef TROJANDEC_REMOTE_SERVICE_H_
#define TROJANDEC_REMOTE_SERVICE_H_

// Client for the model service: JSON over HTTP, images carried as base64 PNG.
//
//   GET  /v1/info     -> {"feature_dim": n, "input_size": t, "model_name": s}
//   POST /v1/features {"images": [b64png, ...]} -> {"features": [[x, ...], ...]}
//   POST /v1/restore  {"image": b64png, "mask": b64png} -> {"image": b64png}
//
// The restore mask is single-channel, 0 where pixels must be synthesized and
// 255 where they are known.

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trojandec/encoder.h"
#include "trojandec/image.h"

namespace trojandec {

struct ServiceInfo {
  std::size_t feature_dim = 0;
  int input_size = 0;
  std::string model_name;
};

struct ClientOptions {
  std::size_t batch_size = 64;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{100};
  std::chrono::seconds timeout{60};
};

// Transport failures (connection refused, timeouts, 5xx) are retried with
// exponential backoff; once attempts run out the call fails with
// kServiceUnreachable. Other non-2xx answers and malformed bodies fail
// immediately with kServiceError.
class ModelServiceClient {
 public:
  explicit ModelServiceClient(std::string endpoint, ClientOptions options = {});

  const std::string& endpoint() const { return endpoint_; }
  const ClientOptions& options() const { return options_; }

  ServiceInfo Info() const;
  // Splits the batch into chunks of options().batch_size.
  std::vector<std::vector<double>> Features(std::span<const Image> batch) const;
  Image Restore(const Image& degraded, const Image& binary_mask) const;

 private:
  std::string Call(const std::string& method, const std::string& path,
                   const std::string& body) const;

  std::string endpoint_;
  ClientOptions options_;
};

class RemoteEncoder : public Encoder {
 public:
  explicit RemoteEncoder(std::string endpoint, ClientOptions options = {});

  EncoderKind kind() const override { return EncoderKind::kRemote; }
  // Both fetch /v1/info on first use.
  std::size_t dim() const override;
  int input_size() const override;

  const ModelServiceClient& client() const { return client_; }

 protected:
  std::vector<FeatureVector> Compute(std::span<const Image> batch) const override;

 private:
  const ServiceInfo& info() const;

  ModelServiceClient client_;
  mutable std::mutex mu_;
  mutable std::optional<ServiceInfo> info_;
};

}  // namespace trojandec

#endif  // TROJANDEC_REMOTE_SERVICE_H_
