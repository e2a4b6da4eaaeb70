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

#ifndef TROJANDEC_CORPUS_H_
#define TROJANDEC_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trojandec/attack_sim.h"
#include "trojandec/image.h"
#include "trojandec/rng.h"

namespace trojandec {

struct CorpusItem {
  Image image;
  int label = -1;
  bool is_trojaned = false;
  int target_label = -1;  // set for trojaned items
  std::string name;
};

struct LabeledCorpus {
  std::vector<CorpusItem> items;

  std::size_t CountClean() const;
  std::size_t CountTrojaned() const;
};

// Class-structured smooth random fields. Each class owns a coarse
// coarse_grid x coarse_grid x channels template; an item perturbs the
// template, upsamples it bilinearly to image_size and adds pixel noise.
struct SmoothFieldSpec {
  int image_size = 32;
  int channels = 3;
  int num_classes = 10;
  int coarse_grid = 4;
  double class_amplitude = 80.0;    // template values in 128 +/- this
  double item_perturbation = 20.0;  // per-item coarse jitter, uniform +/-
  double pixel_noise = 5.0;         // Gaussian sigma per pixel entry
};

class SmoothFieldGenerator {
 public:
  SmoothFieldGenerator(SmoothFieldSpec spec, uint64_t seed);

  const SmoothFieldSpec& spec() const { return spec_; }
  Image Sample(int label, Rng& rng) const;

 private:
  SmoothFieldSpec spec_;
  std::vector<std::vector<double>> templates_;
};

enum class TriggerPlacement { kCorner, kDynamic };

struct SyntheticCorpusSpec {
  SmoothFieldSpec field;
  int clean_items = 100;
  int trojaned_items = 100;
  int target_label = 0;
  TriggerPlacement placement = TriggerPlacement::kCorner;
  uint64_t seed = 0;
};

// Clean items cycle through all labels; trojaned items cycle through the
// non-target labels and carry the trigger.
LabeledCorpus MakeSyntheticCorpus(const SmoothFieldGenerator& generator,
                                  const Trigger& trigger, const SyntheticCorpusSpec& spec);

// Directory layout: PNG files plus an optional manifest.json
//   {"items": [{"file": "x.png", "label": 3, "trojaned": false, "target": -1}, ...]}
// Without a manifest every *.png (sorted by name) is a clean, unlabeled item.
LabeledCorpus LoadCorpusDir(const std::filesystem::path& dir);
void SaveCorpusDir(const std::filesystem::path& dir, const LabeledCorpus& corpus);

}  // namespace trojandec

#endif  // TROJANDEC_CORPUS_H_
