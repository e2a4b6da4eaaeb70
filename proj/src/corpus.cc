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

#include "trojandec/corpus.h"

#include <algorithm>
#include <cstdio>
#include <string>

#include "json.hpp"
#include "trojandec/error.h"
#include "trojandec/png_codec.h"

namespace trojandec {
namespace {

// Bilinear, half-pixel-centred upsampling of a g x g x c grid of doubles.
std::vector<double> Upsample(const std::vector<double>& coarse, int g, int c, int t) {
  std::vector<double> out(static_cast<std::size_t>(t) * t * c);
  const double scale = static_cast<double>(g) / t;
  auto tap = [&](int i, int& lo, int& hi, double& f) {
    const double x = std::clamp((i + 0.5) * scale - 0.5, 0.0, static_cast<double>(g - 1));
    lo = static_cast<int>(x);
    hi = std::min(lo + 1, g - 1);
    f = x - lo;
  };
  for (int r = 0; r < t; ++r) {
    int r0, r1;
    double fy;
    tap(r, r0, r1, fy);
    for (int q = 0; q < t; ++q) {
      int c0, c1;
      double fx;
      tap(q, c0, c1, fx);
      for (int ch = 0; ch < c; ++ch) {
        auto at = [&](int y, int x) { return coarse[(y * g + x) * c + ch]; };
        const double top = (1.0 - fx) * at(r0, c0) + fx * at(r0, c1);
        const double bottom = (1.0 - fx) * at(r1, c0) + fx * at(r1, c1);
        out[(static_cast<std::size_t>(r) * t + q) * c + ch] = (1.0 - fy) * top + fy * bottom;
      }
    }
  }
  return out;
}

}  // namespace

std::size_t LabeledCorpus::CountClean() const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [](const auto& it) { return !it.is_trojaned; }));
}

std::size_t LabeledCorpus::CountTrojaned() const { return items.size() - CountClean(); }

SmoothFieldGenerator::SmoothFieldGenerator(SmoothFieldSpec spec, uint64_t seed)
    : spec_(spec) {
  if (spec.num_classes < 1 || spec.coarse_grid < 1 || spec.image_size < 1 ||
      (spec.channels != 1 && spec.channels != 3)) {
    throw Error(ErrorCode::kInvalidConfig, "bad smooth-field spec");
  }
  const std::size_t cells =
      static_cast<std::size_t>(spec.coarse_grid) * spec.coarse_grid * spec.channels;
  for (int label = 0; label < spec.num_classes; ++label) {
    Rng rng(DeriveSeed(seed, {0xc1a55u, static_cast<uint64_t>(label)}));
    std::vector<double> tmpl(cells);
    for (double& v : tmpl) {
      v = rng.Uniform(128.0 - spec.class_amplitude, 128.0 + spec.class_amplitude);
    }
    templates_.push_back(std::move(tmpl));
  }
}

Image SmoothFieldGenerator::Sample(int label, Rng& rng) const {
  if (label < 0 || label >= spec_.num_classes) {
    throw Error(ErrorCode::kInvalidConfig, "label out of range");
  }
  std::vector<double> coarse = templates_[label];
  for (double& v : coarse) v += rng.Uniform(-spec_.item_perturbation, spec_.item_perturbation);
  const auto field = Upsample(coarse, spec_.coarse_grid, spec_.channels, spec_.image_size);
  Image img(spec_.image_size, spec_.image_size, spec_.channels);
  auto dst = img.mutable_data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = RoundToPixel(field[i] + spec_.pixel_noise * rng.Gaussian());
  }
  return img;
}

LabeledCorpus MakeSyntheticCorpus(const SmoothFieldGenerator& generator,
                                  const Trigger& trigger, const SyntheticCorpusSpec& spec) {
  const int classes = generator.spec().num_classes;
  if (spec.trojaned_items > 0 && classes < 2) {
    throw Error(ErrorCode::kInvalidConfig, "trojaned items need a non-target class");
  }
  LabeledCorpus corpus;
  char name[64];
  for (int i = 0; i < spec.clean_items; ++i) {
    Rng rng(DeriveSeed(spec.seed, {1, static_cast<uint64_t>(i)}));
    const int label = i % classes;
    std::snprintf(name, sizeof(name), "clean_%05d.png", i);
    corpus.items.push_back({generator.Sample(label, rng), label, false, -1, name});
  }
  std::vector<int> sources;
  for (int c = 0; c < classes; ++c) {
    if (c != spec.target_label) sources.push_back(c);
  }
  for (int i = 0; i < spec.trojaned_items; ++i) {
    Rng rng(DeriveSeed(spec.seed, {2, static_cast<uint64_t>(i)}));
    const int label = sources[i % sources.size()];
    const Image base = generator.Sample(label, rng);
    Image img = spec.placement == TriggerPlacement::kCorner
                    ? EmbedCorner(base, trigger)
                    : EmbedDynamic(base, trigger, rng).image;
    std::snprintf(name, sizeof(name), "trojan_%05d.png", i);
    corpus.items.push_back({std::move(img), label, true, spec.target_label, name});
  }
  return corpus;
}

LabeledCorpus LoadCorpusDir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIo, dir.string() + " is not a directory");
  }
  LabeledCorpus corpus;
  const auto manifest = dir / "manifest.json";
  if (std::filesystem::exists(manifest)) {
    const auto bytes = ReadFileBytes(manifest);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(bytes.begin(), bytes.end());
      for (const auto& entry : j.at("items")) {
        CorpusItem item;
        item.name = entry.at("file").get<std::string>();
        item.label = entry.value("label", -1);
        item.is_trojaned = entry.value("trojaned", false);
        item.target_label = entry.value("target", -1);
        corpus.items.push_back(std::move(item));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidConfig, std::string("manifest.json: ") + e.what());
    }
  } else {
    std::vector<std::string> names;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".png") {
        names.push_back(entry.path().filename().string());
      }
    }
    std::sort(names.begin(), names.end());
    for (auto& n : names) corpus.items.push_back({Image(), -1, false, -1, std::move(n)});
  }
  for (auto& item : corpus.items) item.image = ReadPng(dir / item.name);
  return corpus;
}

void SaveCorpusDir(const std::filesystem::path& dir, const LabeledCorpus& corpus) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest = {{"items", nlohmann::json::array()}};
  for (std::size_t i = 0; i < corpus.items.size(); ++i) {
    const auto& item = corpus.items[i];
    std::string name = item.name;
    if (name.empty()) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "item_%05zu.png", i);
      name = buf;
    }
    WritePng(dir / name, item.image);
    manifest["items"].push_back({{"file", name},
                                 {"label", item.label},
                                 {"trojaned", item.is_trojaned},
                                 {"target", item.target_label}});
  }
  const std::string text = manifest.dump(2) + "\n";
  WriteFileBytes(dir / "manifest.json",
                 std::span(reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

}  // namespace trojandec
