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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trojandec/attack_sim.h"
#include "trojandec/config.h"
#include "trojandec/corpus.h"
#include "trojandec/detection.h"
#include "trojandec/error.h"
#include "trojandec/evaluation.h"
#include "trojandec/masking.h"
#include "trojandec/parallel.h"
#include "trojandec/png_codec.h"
#include "trojandec/resize.h"
#include "trojandec/restoration.h"

namespace trojandec::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kEndpointEnv = "TROJANDEC_ENDPOINT";

struct Options {
  std::string image;
  std::string corpus;
  std::string config;
  std::string encoder;
  std::string encoder_url;
  std::string trigger;
  double tau = 0.0;
  int k = 15;
  int s = 1;
  int b = 100;
  uint64_t seed = 0;
  std::string strategy = "harmonic";
  std::string out;
  std::string json_path;
  int jobs = 1;

  // evaluate
  std::string csv;
  bool end_to_end = false;
  bool no_defense = false;

  // gen-masks
  int t = 32;
  int channels = 3;

  // prop1-check
  double beta = 0.25;
  int e_h = 1;
  int e_w = 2;
  int64_t trials = 100000;

  // synth-corpus
  int clean_items = 100;
  int trojaned_items = 100;
  int trigger_size = 10;
  int target_label = 0;
  std::string placement = "corner";
};

void AddDetectionFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON run config; flags given explicitly override it");
  cmd->add_option("--encoder", o.encoder, "synthetic-clean | synthetic-trojaned | remote");
  cmd->add_option("--encoder-url", o.encoder_url, "model service endpoint (implies remote)");
  cmd->add_option("--trigger", o.trigger, "trigger PNG for the synthetic-trojaned encoder");
  cmd->add_option("--tau", o.tau, "trigger match tolerance for the synthetic-trojaned encoder");
  cmd->add_option("--k", o.k, "mask side length")->check(CLI::PositiveNumber);
  cmd->add_option("--s", o.s, "mask stride")->check(CLI::PositiveNumber);
  cmd->add_option("--B", o.b, "gap-statistic reference sets")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "root seed");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
}

bool Given(const CLI::App* cmd, const char* flag) { return cmd->count(flag) > 0; }

std::string EndpointFromEnv() {
  const char* v = std::getenv(kEndpointEnv);
  return v ? std::string(v) : std::string();
}

RunConfig ResolveConfig(const CLI::App* cmd, const Options& o) {
  RunConfig cfg;
  if (!o.config.empty()) cfg = LoadRunConfig(o.config);
  if (Given(cmd, "--k") || o.config.empty()) cfg.detection.k = o.k;
  if (Given(cmd, "--s") || o.config.empty()) cfg.detection.s = o.s;
  if (Given(cmd, "--B") || o.config.empty()) cfg.detection.b = o.b;
  if (Given(cmd, "--seed") || o.config.empty()) cfg.detection.seed = o.seed;

  auto& enc = cfg.encoder;
  if (!o.encoder.empty()) {
    enc.kind = ParseEncoderKind(o.encoder);
  } else if (!o.encoder_url.empty()) {
    enc.kind = EncoderKind::kRemote;
  }
  if (!o.encoder_url.empty()) enc.endpoint = o.encoder_url;
  if (!o.trigger.empty()) enc.trigger_path = o.trigger;
  if (Given(cmd, "--tau")) enc.tau = o.tau;
  if (enc.kind == EncoderKind::kRemote && enc.endpoint.empty()) {
    enc.endpoint = EndpointFromEnv();
    if (enc.endpoint.empty()) {
      throw Error(ErrorCode::kInvalidConfig,
                  std::string("remote encoder needs --encoder-url or ") + kEndpointEnv);
    }
  }
  return cfg;
}

RestoreConfig ResolveRestore(const Options& o, const RunConfig& cfg) {
  RestoreConfig r;
  r.strategy = ParseRestoreStrategy(o.strategy);
  if (r.strategy == RestoreStrategy::kRemoteDiffusion) {
    r.endpoint = !o.encoder_url.empty() ? o.encoder_url : cfg.encoder.endpoint;
    if (r.endpoint.empty()) r.endpoint = EndpointFromEnv();
    if (r.endpoint.empty()) {
      throw Error(ErrorCode::kInvalidConfig,
                  std::string("diffusion strategy needs --encoder-url or ") + kEndpointEnv);
    }
  }
  return r;
}

Image FitToEncoder(const Image& img, const Encoder& enc) {
  const int t = enc.input_size();
  if (img.height() == t && img.width() == t) return img;
  return Resize(img, t);
}

// Inputs named by --image or --corpus: (display name, path).
std::vector<std::pair<std::string, fs::path>> ListInputs(const Options& o) {
  std::vector<std::pair<std::string, fs::path>> inputs;
  if (!o.image.empty() && !o.corpus.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "give either --image or --corpus, not both");
  }
  if (!o.image.empty()) {
    inputs.emplace_back(fs::path(o.image).filename().string(), o.image);
  } else if (!o.corpus.empty()) {
    if (!fs::is_directory(o.corpus)) {
      throw Error(ErrorCode::kIo, o.corpus + " is not a directory");
    }
    for (const auto& entry : fs::directory_iterator(o.corpus)) {
      if (entry.is_regular_file() && entry.path().extension() == ".png") {
        inputs.emplace_back(entry.path().filename().string(), entry.path());
      }
    }
    std::sort(inputs.begin(), inputs.end());
  } else {
    throw Error(ErrorCode::kInvalidConfig, "--image or --corpus is required");
  }
  return inputs;
}

void Emit(const json& j, const Options& o, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (o.json_path.empty()) {
    out << text;
  } else {
    WriteFileBytes(o.json_path,
                   std::span(reinterpret_cast<const uint8_t*>(text.data()), text.size()));
  }
}

struct ImageResult {
  DetectionVerdict verdict;
  Image input;
};

std::vector<ImageResult> DetectAll(const std::vector<std::pair<std::string, fs::path>>& inputs,
                                   const Encoder& enc, const DetectionConfig& det, int jobs) {
  std::vector<Image> images;
  images.reserve(inputs.size());
  for (const auto& [name, path] : inputs) images.push_back(FitToEncoder(ReadPng(path), enc));
  const int t = enc.input_size();
  const int channels = images.empty() ? 3 : images.front().channels();
  const MaskSet masks(det.k, det.s, t, channels, det.seed);
  std::vector<ImageResult> results(images.size());
  ParallelFor(images.size(), jobs, [&](std::size_t i) {
    results[i].verdict = images[i].channels() == channels
                             ? Detect(images[i], enc, masks, det)
                             : Detect(images[i], enc, det);
    results[i].input = std::move(images[i]);
  });
  return results;
}

int RunDetect(const CLI::App* cmd, const Options& o, std::ostream& out) {
  const RunConfig cfg = ResolveConfig(cmd, o);
  const auto inputs = ListInputs(o);
  const auto enc = MakeEncoder(cfg.encoder, cfg.detection.seed);
  const auto results = DetectAll(inputs, *enc, cfg.detection, o.jobs);
  if (!o.image.empty()) {
    Emit(VerdictToJson(results.front().verdict), o, out);
  } else {
    json items = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      json v = VerdictToJson(results[i].verdict);
      v["file"] = inputs[i].first;
      items.push_back(std::move(v));
    }
    Emit({{"items", std::move(items)}, {"config", RunConfigToJson(cfg)}}, o, out);
  }
  return kExitOk;
}

int RunRestore(const CLI::App* cmd, const Options& o, std::ostream& out) {
  const RunConfig cfg = ResolveConfig(cmd, o);
  const RestoreConfig rcfg = ResolveRestore(o, cfg);
  const auto inputs = ListInputs(o);
  const auto enc = MakeEncoder(cfg.encoder, cfg.detection.seed);
  const auto results = DetectAll(inputs, *enc, cfg.detection, o.jobs);
  if (!o.corpus.empty()) fs::create_directories(o.out);

  json items = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& [name, path] = inputs[i];
    const fs::path dest = o.corpus.empty() ? fs::path(o.out) : fs::path(o.out) / name;
    const auto& r = results[i];
    json entry = {{"file", name}, {"is_trojaned", r.verdict.is_trojaned}};
    if (r.verdict.is_trojaned) {
      const MaskSet masks(cfg.detection.k, cfg.detection.s, r.input.size(),
                          r.input.channels(), cfg.detection.seed);
      const RestoredImage restored = Restore(r.input, r.verdict, masks, rcfg);
      WritePng(dest, restored.image);
      entry["strategy"] = std::string(RestoreStrategyName(restored.strategy_used));
      entry["mask"] = {{"a", restored.mask_ref->a},
                       {"b", restored.mask_ref->b},
                       {"k", restored.mask_ref->k}};
    } else {
      // Clean inputs pass through untouched.
      if (fs::absolute(path) != fs::absolute(dest)) {
        fs::copy_file(path, dest, fs::copy_options::overwrite_existing);
      }
    }
    entry["output"] = dest.filename().string();
    items.push_back(std::move(entry));
  }
  Emit(o.image.empty() ? json{{"items", std::move(items)}} : items.front(), o, out);
  return kExitOk;
}

int RunEvaluate(const CLI::App* cmd, const Options& o, std::ostream& out) {
  RunConfig cfg = ResolveConfig(cmd, o);
  LabeledCorpus corpus = LoadCorpusDir(o.corpus);
  std::unique_ptr<Encoder> enc;
  std::vector<FeatureVector> centroids;
  if (o.end_to_end) {
    int num_classes = 0;
    int target_label = -1;
    LabeledCorpus clean;
    for (const auto& item : corpus.items) {
      if (item.is_trojaned) {
        if (target_label < 0) target_label = item.target_label;
        num_classes = std::max(num_classes, item.target_label + 1);
      } else {
        num_classes = std::max(num_classes, item.label + 1);
        clean.items.push_back(item);
      }
    }
    if (cfg.encoder.kind == EncoderKind::kSyntheticTrojaned && target_label >= 0) {
      // Clean items never carry the trigger, so the base encoder yields the
      // same centroids; aim the trojan at the corpus' target class.
      EncoderSpec base = cfg.encoder;
      base.kind = EncoderKind::kSyntheticClean;
      const auto base_enc = MakeEncoder(base, cfg.detection.seed);
      for (auto& item : clean.items) item.image = FitToEncoder(item.image, *base_enc);
      cfg.encoder.target =
          CentroidTarget(ClassCentroids(*base_enc, clean, num_classes), target_label);
    }
    enc = MakeEncoder(cfg.encoder, cfg.detection.seed);
    for (auto& item : clean.items) item.image = FitToEncoder(item.image, *enc);
    centroids = ClassCentroids(*enc, clean, num_classes);
  } else {
    enc = MakeEncoder(cfg.encoder, cfg.detection.seed);
  }
  for (auto& item : corpus.items) item.image = FitToEncoder(item.image, *enc);

  MetricsReport report;
  if (o.end_to_end) {
    EndToEndOptions options;
    options.defense = !o.no_defense;
    options.restore = ResolveRestore(o, cfg);
    options.eval.threads = o.jobs;
    report = EvalEndToEnd(corpus, *enc, cfg.detection, centroids, options);
  } else {
    report = EvalDetection(corpus, *enc, cfg.detection, EvalOptions{o.jobs});
  }
  if (!o.csv.empty()) {
    const std::string csv = ReportItemsCsv(report);
    WriteFileBytes(o.csv, std::span(reinterpret_cast<const uint8_t*>(csv.data()), csv.size()));
  }
  json j = ReportToJson(report);
  j["config"] = RunConfigToJson(cfg);
  if (o.end_to_end) {
    j["config"]["defense"] = !o.no_defense;
    j["config"]["strategy"] = o.strategy;
  }
  Emit(j, o, out);
  return kExitOk;
}

int RunGenMasks(const Options& o, std::ostream& out) {
  const MaskSet masks(o.k, o.s, o.t, o.channels, o.seed);
  json j = json::parse(masks.ToJson());
  j["count"] = masks.size();
  json positions = json::array();
  for (std::size_t i = 0; i < masks.size(); ++i) {
    positions.push_back({masks[i].a, masks[i].b});
  }
  j["positions"] = std::move(positions);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    char name[32];
    for (std::size_t i = 0; i < masks.size(); ++i) {
      std::snprintf(name, sizeof(name), "mask_%04zu.png", i);
      WritePng(fs::path(o.out) / name, BinaryMaskImage(masks[i]));
    }
  }
  Emit(j, o, out);
  return kExitOk;
}

int RunProp1(const Options& o, std::ostream& out) {
  const double bound = Prop1Bound(o.beta, o.e_h, o.e_w);
  const double empirical = Prop1MonteCarlo(o.beta, o.e_h, o.e_w, o.trials, o.seed);
  const double sigma = std::sqrt(std::max(bound * (1.0 - bound), 0.0) /
                                 static_cast<double>(o.trials));
  Emit({{"beta", o.beta},
        {"e_h", o.e_h},
        {"e_w", o.e_w},
        {"trials", o.trials},
        {"seed", o.seed},
        {"bound", bound},
        {"empirical", empirical},
        {"sigma", sigma},
        {"holds", empirical >= bound - 3.0 * sigma}},
       o, out);
  return kExitOk;
}

int RunSynthCorpus(const Options& o, std::ostream& out) {
  SyntheticCorpusSpec spec;
  spec.clean_items = o.clean_items;
  spec.trojaned_items = o.trojaned_items;
  spec.target_label = o.target_label;
  spec.seed = DeriveSeed(o.seed, {1});
  if (o.placement == "corner") {
    spec.placement = TriggerPlacement::kCorner;
  } else if (o.placement == "dynamic") {
    spec.placement = TriggerPlacement::kDynamic;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "--placement must be corner or dynamic");
  }
  const SmoothFieldGenerator generator(spec.field, DeriveSeed(o.seed, {2}));
  const Trigger trigger = RandomTrigger(o.trigger_size, o.trigger_size, spec.field.channels,
                                        DeriveSeed(o.seed, {3}));
  const LabeledCorpus corpus = MakeSyntheticCorpus(generator, trigger, spec);
  SaveCorpusDir(o.out, corpus);
  const fs::path trigger_path = fs::path(o.out) / "trigger" / "trigger.png";
  fs::create_directories(trigger_path.parent_path());
  SaveTrigger(trigger_path, trigger);
  Emit({{"items", corpus.items.size()},
        {"clean", corpus.CountClean()},
        {"trojaned", corpus.CountTrojaned()},
        {"trigger", trigger_path.string()}},
       o, out);
  return kExitOk;
}

int ExitCodeFor(const Error& e) {
  return e.is_service_error() ? kExitService : kExitConfig;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Black-box trojan input detection and restoration for image encoders",
               "trojandec");
  app.require_subcommand(1);
  Options o;

  auto* detect = app.add_subcommand("detect", "Flag trojaned inputs");
  detect->add_option("--image", o.image, "input PNG");
  detect->add_option("--corpus", o.corpus, "directory of input PNGs");
  detect->add_option("--json", o.json_path, "write JSON here instead of stdout");
  AddDetectionFlags(detect, o);

  auto* restore = app.add_subcommand("restore", "Detect, then restore trojaned inputs");
  restore->add_option("--image", o.image, "input PNG");
  restore->add_option("--corpus", o.corpus, "directory of input PNGs");
  restore->add_option("--out", o.out, "output PNG (or directory with --corpus)")->required();
  restore->add_option("--strategy", o.strategy, "harmonic | diffusion");
  restore->add_option("--json", o.json_path, "write JSON here instead of stdout");
  AddDetectionFlags(restore, o);

  auto* evaluate = app.add_subcommand("evaluate", "Score detection over a labeled corpus");
  evaluate->add_option("--corpus", o.corpus, "corpus directory")->required();
  evaluate->add_option("--json", o.json_path, "write the report here instead of stdout");
  evaluate->add_option("--csv", o.csv, "also write per-item verdicts as CSV");
  evaluate->add_flag("--end-to-end", o.end_to_end,
                     "classify (nearest class centroid) after restoration");
  evaluate->add_flag("--no-defense", o.no_defense, "with --end-to-end: skip detection");
  evaluate->add_option("--strategy", o.strategy, "harmonic | diffusion");
  AddDetectionFlags(evaluate, o);

  auto* gen_masks = app.add_subcommand("gen-masks", "List the occlusion mask set");
  gen_masks->add_option("--k", o.k, "mask side length")->check(CLI::PositiveNumber);
  gen_masks->add_option("--s", o.s, "mask stride")->check(CLI::PositiveNumber);
  gen_masks->add_option("--t", o.t, "image side length")->check(CLI::PositiveNumber);
  gen_masks->add_option("--channels", o.channels, "1 or 3")->check(CLI::IsMember({1, 3}));
  gen_masks->add_option("--seed", o.seed, "root seed");
  gen_masks->add_option("--out", o.out, "directory for binary mask PNGs");
  gen_masks->add_option("--json", o.json_path, "write JSON here instead of stdout");

  auto* prop1 = app.add_subcommand("prop1-check",
                                   "Compare the trigger-distance bound with Monte Carlo");
  prop1->add_option("--beta", o.beta, "L1 radius")->check(CLI::NonNegativeNumber);
  prop1->add_option("--eh", o.e_h, "trigger height")->check(CLI::PositiveNumber);
  prop1->add_option("--ew", o.e_w, "trigger width")->check(CLI::PositiveNumber);
  prop1->add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  prop1->add_option("--seed", o.seed, "root seed");
  prop1->add_option("--json", o.json_path, "write JSON here instead of stdout");

  auto* synth = app.add_subcommand("synth-corpus", "Write a labeled synthetic corpus");
  synth->add_option("--out", o.out, "output directory")->required();
  synth->add_option("--clean", o.clean_items, "clean items")->check(CLI::NonNegativeNumber);
  synth->add_option("--trojaned", o.trojaned_items, "trojaned items")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--trigger-size", o.trigger_size, "square trigger side")
      ->check(CLI::PositiveNumber);
  synth->add_option("--target", o.target_label, "attacker target label");
  synth->add_option("--placement", o.placement, "corner | dynamic");
  synth->add_option("--seed", o.seed, "root seed");
  synth->add_option("--json", o.json_path, "write JSON here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*detect) return RunDetect(detect, o, out);
    if (*restore) return RunRestore(restore, o, out);
    if (*evaluate) return RunEvaluate(evaluate, o, out);
    if (*gen_masks) return RunGenMasks(o, out);
    if (*prop1) return RunProp1(o, out);
    if (*synth) return RunSynthCorpus(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace trojandec::cli
