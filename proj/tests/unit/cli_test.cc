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

#include "cli.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "stub_service.h"
#include "trojandec/attack_sim.h"
#include "trojandec/encoder.h"
#include "trojandec/png_codec.h"

namespace trojandec::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunCli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string ReadText(const fs::path& p) {
  const auto bytes = ReadFileBytes(p);
  return std::string(bytes.begin(), bytes.end());
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::path(::testing::TempDir()) / "cli_test";
    fs::remove_all(root_);
    const Result r = RunCli({"synth-corpus", "--out", (root_ / "corpus").string(), "--clean",
                             "6", "--trojaned", "6", "--seed", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static fs::path Corpus() { return root_ / "corpus"; }
  static std::string Trigger() { return (root_ / "corpus" / "trigger" / "trigger.png").string(); }
  static std::string CleanImage() { return (Corpus() / "clean_00000.png").string(); }
  static std::string TrojanImage() { return (Corpus() / "trojan_00000.png").string(); }

  static fs::path root_;
};

fs::path CliTest::root_;

TEST_F(CliTest, DetectCleanImage) {
  const Result r = RunCli({"detect", "--image", CleanImage(), "--encoder", "synthetic-clean",
                           "--k", "15", "--s", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_FALSE(j.at("is_trojaned").get<bool>());
  for (const char* key : {"k_star", "G", "s_prime", "argmin_index"}) EXPECT_TRUE(j.contains(key));
}

TEST_F(CliTest, DetectTrojanedImage) {
  const Result r = RunCli({"detect", "--image", TrojanImage(), "--encoder",
                           "synthetic-trojaned", "--trigger", Trigger()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out).at("is_trojaned").get<bool>());
}

TEST_F(CliTest, DetectResizesToEncoderInput) {
  const fs::path big = root_ / "big.png";
  WritePng(big, Image(64, 48, 3, 90));
  const Result r = RunCli({"detect", "--image", big.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(json::parse(r.out).at("is_trojaned").get<bool>());
}

TEST_F(CliTest, DetectCorpusDirectory) {
  const Result r = RunCli({"detect", "--corpus", Corpus().string(), "--encoder",
                           "synthetic-trojaned", "--trigger", Trigger(), "--jobs", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_EQ(j.at("items").size(), 12u);
  for (const auto& item : j.at("items")) {
    const bool trojan = item.at("file").get<std::string>().rfind("trojan_", 0) == 0;
    EXPECT_EQ(item.at("is_trojaned").get<bool>(), trojan) << item.at("file");
  }
}

TEST_F(CliTest, MissingImageIsConfigError) {
  const Result r = RunCli({"detect", "--encoder", "synthetic-clean"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("--image"), std::string::npos);
  EXPECT_EQ(r.err.find('\n'), r.err.size() - 1);  // single line
}

TEST_F(CliTest, BadArgumentsAreConfigErrors) {
  EXPECT_EQ(RunCli({}).code, kExitConfig);
  EXPECT_EQ(RunCli({"detect", "--image", CleanImage(), "--k", "0"}).code, kExitConfig);
  EXPECT_EQ(RunCli({"detect", "--image", CleanImage(), "--encoder", "vit"}).code, kExitConfig);
  EXPECT_EQ(RunCli({"detect", "--image", CleanImage(), "--k", "40"}).code, kExitConfig);
  EXPECT_EQ(RunCli({"detect", "--image", (root_ / "nope.png").string()}).code, kExitConfig);
  EXPECT_EQ(RunCli({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(RunCli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, RemoteWithoutEndpointIsConfigError) {
  unsetenv("TROJANDEC_ENDPOINT");
  EXPECT_EQ(RunCli({"detect", "--image", CleanImage(), "--encoder", "remote"}).code,
            kExitConfig);
}

TEST_F(CliTest, ServiceDownIsServiceError) {
  const Result r = RunCli({"evaluate", "--corpus", Corpus().string(), "--encoder-url",
                           "http://127.0.0.1:1"});
  EXPECT_EQ(r.code, kExitService);
  EXPECT_NE(r.err.find("ServiceUnreachable"), std::string::npos);
}

TEST_F(CliTest, EvaluateAgainstStubService) {
  const BlockMeanEncoder local;
  testing::StubService stub(local);
  const Result r = RunCli({"evaluate", "--corpus", Corpus().string(), "--encoder-url",
                           stub.endpoint(), "--k", "15", "--s", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("counts").at("clean_total"), 6);
  EXPECT_GT(stub.feature_requests(), 0);
}

TEST_F(CliTest, EndpointFromEnvironment) {
  const BlockMeanEncoder local;
  testing::StubService stub(local);
  setenv("TROJANDEC_ENDPOINT", stub.endpoint().c_str(), 1);
  const Result r = RunCli({"detect", "--image", CleanImage(), "--encoder", "remote", "--s", "8"});
  unsetenv("TROJANDEC_ENDPOINT");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(stub.feature_requests(), 0);
}

TEST_F(CliTest, IdenticalInvocationsGiveIdenticalBytes) {
  for (const char* cmd : {"detect", "evaluate"}) {
    std::vector<std::string> outputs;
    for (int run = 0; run < 2; ++run) {
      const fs::path json_path = root_ / (std::string(cmd) + std::to_string(run) + ".json");
      std::vector<std::string> args = {cmd, "--encoder", "synthetic-trojaned", "--trigger",
                                       Trigger(), "--seed", "9", "--json", json_path.string()};
      if (std::string(cmd) == "detect") {
        args.insert(args.end(), {"--image", TrojanImage()});
      } else {
        args.insert(args.end(), {"--corpus", Corpus().string(), "--jobs", run ? "3" : "1"});
      }
      const Result r = RunCli(args);
      ASSERT_EQ(r.code, 0) << r.err;
      EXPECT_TRUE(r.out.empty());
      outputs.push_back(ReadText(json_path));
    }
    EXPECT_EQ(outputs[0], outputs[1]) << cmd;
  }
}

TEST_F(CliTest, RestoreWritesRestoredOrCopiedImages) {
  const fs::path out_dir = root_ / "restored";
  const Result r = RunCli({"restore", "--corpus", Corpus().string(), "--out", out_dir.string(),
                           "--encoder", "synthetic-trojaned", "--trigger", Trigger()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Image trojan = ReadPng(TrojanImage());
  const Image restored = ReadPng(out_dir / "trojan_00000.png");
  EXPECT_NE(restored, trojan);
  EXPECT_FALSE(SyntheticTrojanEncoder(BlockMeanEncoder(), LoadTrigger(Trigger()),
                                      DefaultTarget(48, 0))
                   .ContainsTrigger(restored));
  EXPECT_EQ(ReadFileBytes(out_dir / "clean_00000.png"), ReadFileBytes(CleanImage()));
}

TEST_F(CliTest, RestoreRequiresOut) {
  EXPECT_EQ(RunCli({"restore", "--image", TrojanImage()}).code, kExitConfig);
}

TEST_F(CliTest, EvaluateEndToEnd) {
  const fs::path csv = root_ / "items.csv";
  const Result with = RunCli({"evaluate", "--corpus", Corpus().string(), "--encoder",
                              "synthetic-trojaned", "--trigger", Trigger(), "--end-to-end",
                              "--csv", csv.string()});
  ASSERT_EQ(with.code, 0) << with.err;
  EXPECT_EQ(json::parse(with.out).at("asr").get<double>(), 0.0);
  EXPECT_NE(ReadText(csv).find("trojan_00005.png"), std::string::npos);
  const Result without =
      RunCli({"evaluate", "--corpus", Corpus().string(), "--encoder", "synthetic-trojaned",
              "--trigger", Trigger(), "--end-to-end", "--no-defense"});
  ASSERT_EQ(without.code, 0) << without.err;
  EXPECT_EQ(json::parse(without.out).at("asr").get<double>(), 1.0);
}

TEST_F(CliTest, GenMasks) {
  const Result r = RunCli({"gen-masks", "--k", "15", "--s", "1", "--t", "32"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("count"), 324);
  EXPECT_EQ(j.at("positions").at(18), json::array({1, 0}));
  EXPECT_EQ(RunCli({"gen-masks", "--k", "40", "--t", "32"}).code, kExitConfig);
}

TEST_F(CliTest, Prop1Check) {
  const Result r = RunCli({"prop1-check", "--beta", "0.25", "--eh", "1", "--ew", "2",
                           "--trials", "20000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_DOUBLE_EQ(j.at("bound").get<double>(), 0.875);
  EXPECT_TRUE(j.at("holds").get<bool>());
}

TEST_F(CliTest, ConfigFileWithOverrides) {
  const fs::path cfg = root_ / "run.json";
  const std::string text = R"({"k": 10, "s": 2, "B": 30, "seed": 4,
                               "encoder": {"kind": "synthetic-clean"}})";
  WriteFileBytes(cfg, std::vector<uint8_t>(text.begin(), text.end()));
  const Result r = RunCli({"detect", "--corpus", Corpus().string(), "--config", cfg.string(),
                           "--B", "12"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json c = json::parse(r.out).at("config");
  EXPECT_EQ(c.at("k"), 10);
  EXPECT_EQ(c.at("s"), 2);
  EXPECT_EQ(c.at("B"), 12);
  EXPECT_EQ(c.at("seed"), 4);
}

}  // namespace
}  // namespace trojandec::cli
