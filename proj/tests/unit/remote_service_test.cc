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

#include <chrono>
#include <vector>

#include "gtest/gtest.h"
#include "stub_service.h"
#include "trojandec/detection.h"
#include "trojandec/error.h"
#include "trojandec/rng.h"

namespace trojandec {
namespace {

using ::trojandec::testing::StubOptions;
using ::trojandec::testing::StubService;

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kIo;
}

ClientOptions FastOptions() {
  ClientOptions o;
  o.initial_backoff = std::chrono::milliseconds(1);
  return o;
}

std::vector<Image> RandomImages(int n, uint64_t seed) {
  Rng rng(seed);
  std::vector<Image> out;
  for (int i = 0; i < n; ++i) {
    Image img(32, 32, 3);
    auto d = img.mutable_data();
    rng.FillBytes(d.begin(), d.end());
    out.push_back(std::move(img));
  }
  return out;
}

TEST(RemoteEncoderTest, InfoAndFeaturesMatchBackingEncoder) {
  const BlockMeanEncoder local;
  StubService stub(local);
  const RemoteEncoder remote(stub.endpoint(), FastOptions());
  EXPECT_EQ(remote.dim(), 48u);
  EXPECT_EQ(remote.input_size(), 32);
  const ServiceInfo info = remote.client().Info();
  EXPECT_EQ(info.model_name, "stub");

  const auto images = RandomImages(5, 1);
  const auto got = remote.Features(images);
  const auto want = local.Features(images);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    for (std::size_t j = 0; j < 48; ++j) {
      EXPECT_DOUBLE_EQ(got[i].values[j], want[i].values[j]);
    }
  }
}

TEST(RemoteEncoderTest, SplitsLargeBatches) {
  const BlockMeanEncoder local;
  StubService stub(local, StubOptions{.max_batch = 4});
  ClientOptions options = FastOptions();
  options.batch_size = 4;
  const RemoteEncoder remote(stub.endpoint(), options);
  EXPECT_EQ(remote.Features(RandomImages(10, 2)).size(), 10u);
  EXPECT_EQ(stub.feature_requests(), 3);

  options.batch_size = 5;
  const RemoteEncoder greedy(stub.endpoint(), options);
  EXPECT_EQ(CodeOf([&] { greedy.Features(RandomImages(5, 3)); }), ErrorCode::kServiceError);
}

TEST(RemoteEncoderTest, RetriesTransientFailures) {
  const BlockMeanEncoder local;
  StubService stub(local, StubOptions{.fail_first = 2});
  const RemoteEncoder remote(stub.endpoint(), FastOptions());
  EXPECT_EQ(remote.dim(), 48u);  // third attempt succeeds

  StubService down(local, StubOptions{.fail_first = 100});
  const RemoteEncoder hopeless(down.endpoint(), FastOptions());
  EXPECT_EQ(CodeOf([&] { hopeless.dim(); }), ErrorCode::kServiceUnreachable);
}

TEST(RemoteEncoderTest, ShortResponseIsDimensionMismatch) {
  const BlockMeanEncoder local;
  StubService stub(local, StubOptions{.drop_feature = true});
  const RemoteEncoder remote(stub.endpoint(), FastOptions());
  EXPECT_EQ(CodeOf([&] { remote.Features(RandomImages(3, 4)); }),
            ErrorCode::kDimensionMismatch);
}

TEST(RemoteEncoderTest, AdvertisedWidthIsEnforced) {
  const BlockMeanEncoder local;
  StubService stub(local, StubOptions{.advertised_dim = 64});
  const RemoteEncoder remote(stub.endpoint(), FastOptions());
  EXPECT_EQ(CodeOf([&] { remote.Features(RandomImages(1, 5)); }),
            ErrorCode::kDimensionMismatch);
}

TEST(RemoteEncoderTest, WrongImageSizeIsServiceError) {
  const BlockMeanEncoder local;
  StubService stub(local);
  const ModelServiceClient client(stub.endpoint(), FastOptions());
  const std::vector<Image> small = {Image(16, 16, 3)};
  EXPECT_EQ(CodeOf([&] { client.Features(small); }), ErrorCode::kServiceError);
}

TEST(RemoteEncoderTest, UnreachableEndpoint) {
  ClientOptions options = FastOptions();
  options.max_attempts = 2;
  const RemoteEncoder remote("http://127.0.0.1:1", options);
  EXPECT_EQ(CodeOf([&] { remote.input_size(); }), ErrorCode::kServiceUnreachable);
  try {
    remote.dim();
  } catch (const Error& e) {
    EXPECT_TRUE(e.is_service_error());
  }
}

TEST(RemoteEncoderTest, DetectionIsScaleInvariantOverTheWire) {
  const BlockMeanEncoder local;
  StubService unit(local);
  StubService scaled(local, StubOptions{.feature_scale = 123.0});
  const RemoteEncoder a(unit.endpoint(), FastOptions());
  const RemoteEncoder b(scaled.endpoint(), FastOptions());
  DetectionConfig cfg;
  cfg.k = 12;
  cfg.s = 4;
  const Image img = RandomImages(1, 6).front();
  const DetectionVerdict va = Detect(img, a, cfg);
  const DetectionVerdict vb = Detect(img, b, cfg);
  EXPECT_EQ(va.is_trojaned, vb.is_trojaned);
  EXPECT_EQ(va.argmin_index, vb.argmin_index);
}

TEST(ModelServiceClientTest, RejectsBadConfiguration) {
  EXPECT_THROW(ModelServiceClient(""), Error);
  ClientOptions options;
  options.batch_size = 0;
  EXPECT_THROW(ModelServiceClient("http://127.0.0.1:1", options), Error);
}

}  // namespace
}  // namespace trojandec
