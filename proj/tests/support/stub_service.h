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

#ifndef TROJANDEC_TESTS_SUPPORT_STUB_SERVICE_H_
#define TROJANDEC_TESTS_SUPPORT_STUB_SERVICE_H_

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "trojandec/encoder.h"

namespace httplib {
class Server;
}

namespace trojandec::testing {

enum class RestoreMode {
  kEcho,      // returns the degraded image unchanged
  kDrifting,  // perturbs every pixel, including ones it should keep
  kHarmonic,  // fills the hole with the local harmonic inpainter
};

struct StubOptions {
  RestoreMode restore_mode = RestoreMode::kHarmonic;
  // Multiplies every returned feature vector.
  double feature_scale = 1.0;
  // Answer this many requests with 503 before behaving.
  int fail_first = 0;
  // Reject /v1/features batches larger than this with 413 (0 = no limit).
  std::size_t max_batch = 0;
  // Return one fewer vector than images requested.
  bool drop_feature = false;
  // Report this feature_dim in /v1/info (0 = the encoder's).
  std::size_t advertised_dim = 0;
};

// In-process model service on 127.0.0.1 speaking the JSON-over-HTTP
// protocol, backed by a local encoder.
class StubService {
 public:
  StubService(const Encoder& encoder, StubOptions options = {});
  ~StubService();

  StubService(const StubService&) = delete;
  StubService& operator=(const StubService&) = delete;

  std::string endpoint() const;
  int feature_requests() const { return feature_requests_; }
  int restore_requests() const { return restore_requests_; }

 private:
  bool ShouldFail();

  const Encoder& encoder_;
  StubOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> failures_left_;
  std::atomic<int> feature_requests_{0};
  std::atomic<int> restore_requests_{0};
};

}  // namespace trojandec::testing

#endif  // TROJANDEC_TESTS_SUPPORT_STUB_SERVICE_H_
