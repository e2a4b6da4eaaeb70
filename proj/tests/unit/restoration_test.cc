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

#include "trojandec/restoration.h"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "gtest/gtest.h"
#include "stub_service.h"
#include "trojandec/attack_sim.h"
#include "trojandec/corpus.h"
#include "trojandec/error.h"
#include "trojandec/rng.h"

namespace trojandec {
namespace {

using ::trojandec::testing::RestoreMode;
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

Image RandomImage(Rng& rng, int t, int c) {
  Image img(t, t, c);
  auto d = img.mutable_data();
  rng.FillBytes(d.begin(), d.end());
  return img;
}

RestorationRequest SquareRequest(const Image& img, int a, int b, int k) {
  Rng rng(0);
  const Mask mask = CreateMask(a, b, k, img.size(), img.channels(), rng);
  return {ZeroMasked(img, mask), BinaryMaskImage(mask), RestoreStrategy::kHarmonic};
}

// Direct sparse solve of the discrete Laplace equation on the hole with
// mirrored (reflect-101) borders.
std::vector<double> DirectHarmonic(const Image& img, const Image& mask, int ch) {
  const int h = img.height(), w = img.width();
  auto reflect = [](int i, int n) { return i < 0 ? -i : (i >= n ? 2 * n - 2 - i : i); };
  std::map<int, int> var;
  for (int i = 0; i < h * w; ++i) {
    if (mask.at(i / w, i % w) == 0) var.emplace(i, static_cast<int>(var.size()));
  }
  Eigen::SparseMatrix<double> A(var.size(), var.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(var.size());
  std::vector<Eigen::Triplet<double>> entries;
  for (const auto& [idx, row] : var) {
    const int r = idx / w, c = idx % w;
    entries.emplace_back(row, row, 4.0);
    const int nbrs[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
    for (const auto& n : nbrs) {
      const int nr = reflect(n[0], h), nc = reflect(n[1], w);
      const auto it = var.find(nr * w + nc);
      if (it != var.end()) {
        entries.emplace_back(row, it->second, -1.0);
      } else {
        rhs[row] += img.at(nr, nc, ch);
      }
    }
  }
  A.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver(A);
  const Eigen::VectorXd x = solver.solve(rhs);
  std::vector<double> out(h * w, -1.0);
  for (const auto& [idx, row] : var) out[idx] = x[row];
  return out;
}

TEST(InpaintHarmonicTest, ConstantImageStaysConstant) {
  const Image img(32, 32, 3, 100);
  EXPECT_EQ(InpaintHarmonic(SquareRequest(img, 9, 4, 15)).image, img);
}

TEST(InpaintHarmonicTest, MaskCoveringEverything) {
  const Image img(8, 8, 1, 5);
  EXPECT_EQ(CodeOf([&] { InpaintHarmonic(SquareRequest(img, 0, 0, 8)); }),
            ErrorCode::kMaskCoversEverything);
}

TEST(InpaintHarmonicTest, ReproducesLinearRamp) {
  Image img(32, 32, 1);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) img.at(r, c) = static_cast<uint8_t>(8 * c);
  }
  const Image out = InpaintHarmonic(SquareRequest(img, 8, 8, 15)).image;
  for (int r = 8; r < 23; ++r) {
    for (int c = 8; c < 23; ++c) EXPECT_NEAR(out.at(r, c), img.at(r, c), 1);
  }
}

TEST(InpaintHarmonicTest, MatchesDirectSolve) {
  Rng rng(21);
  for (int trial = 0; trial < 12; ++trial) {
    const int t = 12 + static_cast<int>(rng.Below(21));
    const int k = 1 + static_cast<int>(rng.Below(t - 1));
    const int a = static_cast<int>(rng.Below(t - k + 1));
    const int b = static_cast<int>(rng.Below(t - k + 1));
    const Image img = RandomImage(rng, t, 3);
    const RestorationRequest req = SquareRequest(img, a, b, k);
    const Image out = InpaintHarmonic(req).image;
    for (int ch = 0; ch < 3; ++ch) {
      const auto exact = DirectHarmonic(req.degraded, req.mask, ch);
      for (int r = a; r < a + k; ++r) {
        for (int c = b; c < b + k; ++c) {
          EXPECT_NEAR(out.at(r, c, ch), exact[r * t + c], 1.0)
              << "t=" << t << " k=" << k << " at " << r << "," << c;
        }
      }
    }
  }
}

TEST(InpaintHarmonicTest, KnownPixelsAndMaximumPrinciple) {
  Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const Image img = RandomImage(rng, 32, 3);
    const int a = static_cast<int>(rng.Below(18)), b = static_cast<int>(rng.Below(18));
    const RestorationRequest req = SquareRequest(img, a, b, 15);
    const RestoredImage out = InpaintHarmonic(req);
    ASSERT_TRUE(out.mask_ref.has_value());
    EXPECT_EQ(out.mask_ref->a, a);
    EXPECT_EQ(out.mask_ref->b, b);
    EXPECT_EQ(out.mask_ref->k, 15);
    for (int ch = 0; ch < 3; ++ch) {
      int lo = 255, hi = 0;
      for (int r = 0; r < 32; ++r) {
        for (int c = 0; c < 32; ++c) {
          if (req.mask.at(r, c) == 0) continue;
          lo = std::min<int>(lo, img.at(r, c, ch));
          hi = std::max<int>(hi, img.at(r, c, ch));
          ASSERT_EQ(out.image.at(r, c, ch), img.at(r, c, ch));
        }
      }
      for (int r = a; r < a + 15; ++r) {
        for (int c = b; c < b + 15; ++c) {
          EXPECT_GE(out.image.at(r, c, ch), lo);
          EXPECT_LE(out.image.at(r, c, ch), hi);
        }
      }
    }
  }
}

TEST(InpaintHarmonicTest, RejectsMaskGeometry) {
  const RestorationRequest req{Image(8, 8, 3), Image(8, 8, 3, 255), RestoreStrategy::kHarmonic};
  EXPECT_EQ(CodeOf([&] { InpaintHarmonic(req); }), ErrorCode::kGeometryMismatch);
}

TEST(SelectPrototypeTest, ZeroesArgminSquare) {
  const MaskSet masks(15, 1, 32, 3, 0);
  DetectionVerdict verdict;
  verdict.is_trojaned = true;
  verdict.argmin_index = 40;
  const Image img(32, 32, 3, 200);
  const Prototype p = SelectPrototype(verdict, masks, img);
  EXPECT_EQ(p.index, 40u);
  EXPECT_EQ(p.mask.a, masks[40].a);
  int zeros = 0;
  for (uint8_t v : p.degraded.data()) zeros += v == 0;
  EXPECT_EQ(zeros, 15 * 15 * 3);
  for (int r = p.mask.a; r < p.mask.a + 15; ++r) EXPECT_EQ(p.degraded.at(r, p.mask.b, 2), 0);

  verdict.is_trojaned = false;
  EXPECT_EQ(CodeOf([&] { SelectPrototype(verdict, masks, img); }), ErrorCode::kNotTrojaned);
}

TEST(RestoreTest, CleanVerdictIsIdentity) {
  Rng rng(23);
  const Image img = RandomImage(rng, 32, 3);
  const RestoredImage out = Restore(img, DetectionVerdict{}, MaskSet(15, 1, 32, 3, 0), {});
  EXPECT_EQ(out.image, img);
  EXPECT_FALSE(out.mask_ref.has_value());
}

TEST(RestoreTest, TrojanedImageChangesOnlyInsideSquareAndLosesTrigger) {
  const SmoothFieldGenerator generator(SmoothFieldSpec{}, 1);
  const Trigger trigger = RandomTrigger(10, 10, 3, 2);
  const SyntheticTrojanEncoder enc(BlockMeanEncoder(), trigger, DefaultTarget(48, 3));
  const DetectionConfig cfg;
  const MaskSet masks(cfg.k, cfg.s, 32, 3, cfg.seed);
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const Image img = EmbedCorner(generator.Sample(static_cast<int>(seed), rng), trigger);
    const DetectionVerdict verdict = Detect(img, enc, masks, cfg);
    ASSERT_TRUE(verdict.is_trojaned);
    const RestoredImage out = Restore(img, verdict, masks, RestoreConfig{});
    const Mask& m = masks[verdict.argmin_index];
    for (int r = 0; r < 32; ++r) {
      for (int c = 0; c < 32; ++c) {
        if (m.Covers(r, c)) continue;
        for (int ch = 0; ch < 3; ++ch) ASSERT_EQ(out.image.at(r, c, ch), img.at(r, c, ch));
      }
    }
    EXPECT_FALSE(enc.ContainsTrigger(out.image));
    EXPECT_EQ(enc.Features(out.image), enc.base().Features(out.image));
  }
}

TEST(RestoreRemoteTest, EchoServiceLeavesHoleZero) {
  const BlockMeanEncoder enc;
  StubService stub(enc, StubOptions{.restore_mode = RestoreMode::kEcho});
  Rng rng(24);
  const RestorationRequest req = SquareRequest(RandomImage(rng, 32, 3), 3, 5, 15);
  const RestoredImage out = RestoreRemote(req, ModelServiceClient(stub.endpoint()));
  EXPECT_EQ(out.image, req.degraded);
  EXPECT_EQ(out.strategy_used, RestoreStrategy::kRemoteDiffusion);
  EXPECT_EQ(stub.restore_requests(), 1);
}

TEST(RestoreRemoteTest, DriftingServiceIsProjectedBack) {
  const BlockMeanEncoder enc;
  StubService stub(enc, StubOptions{.restore_mode = RestoreMode::kDrifting});
  Rng rng(25);
  const Image img = RandomImage(rng, 32, 3);
  const RestorationRequest req = SquareRequest(img, 10, 2, 15);
  const Image out = RestoreRemote(req, ModelServiceClient(stub.endpoint())).image;
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        const bool hole = req.mask.at(r, c) == 0;
        EXPECT_EQ(out.at(r, c, ch), hole ? 0x2a : img.at(r, c, ch));
      }
    }
  }
}

TEST(RestoreRemoteTest, UnreachableService) {
  ClientOptions options;
  options.max_attempts = 2;
  options.initial_backoff = std::chrono::milliseconds(1);
  const ModelServiceClient client("http://127.0.0.1:1", options);
  const RestorationRequest req = SquareRequest(Image(16, 16, 3, 1), 0, 0, 4);
  EXPECT_EQ(CodeOf([&] { RestoreRemote(req, client); }), ErrorCode::kServiceUnreachable);
}

TEST(RestoreTest, DiffusionStrategyThroughConfig) {
  const BlockMeanEncoder enc;
  StubService stub(enc);
  Rng rng(26);
  const Image img = RandomImage(rng, 32, 3);
  DetectionVerdict verdict;
  verdict.is_trojaned = true;
  verdict.argmin_index = 7;
  const MaskSet masks(15, 1, 32, 3, 0);
  RestoreConfig cfg;
  cfg.strategy = RestoreStrategy::kRemoteDiffusion;
  cfg.endpoint = stub.endpoint();
  const RestoredImage remote = Restore(img, verdict, masks, cfg);
  cfg.strategy = RestoreStrategy::kHarmonic;
  const RestoredImage local = Restore(img, verdict, masks, cfg);
  // The stub restores with the same harmonic fill.
  EXPECT_EQ(remote.image, local.image);
  ASSERT_TRUE(remote.mask_ref.has_value());
  EXPECT_EQ(remote.mask_ref->a, masks[7].a);
  EXPECT_EQ(remote.mask_ref->b, masks[7].b);

  cfg.strategy = RestoreStrategy::kRemoteDiffusion;
  cfg.endpoint.clear();
  EXPECT_EQ(CodeOf([&] { Restore(img, verdict, masks, cfg); }), ErrorCode::kInvalidConfig);
}

TEST(RestoreStrategyTest, NamesRoundTrip) {
  for (auto s : {RestoreStrategy::kHarmonic, RestoreStrategy::kRemoteDiffusion}) {
    EXPECT_EQ(ParseRestoreStrategy(RestoreStrategyName(s)), s);
  }
  EXPECT_THROW(ParseRestoreStrategy("telea"), Error);
}

}  // namespace
}  // namespace trojandec
