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

#ifndef TROJANDEC_EVALUATION_H_
#define TROJANDEC_EVALUATION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "trojandec/corpus.h"
#include "trojandec/detection.h"
#include "trojandec/encoder.h"
#include "trojandec/restoration.h"

namespace trojandec {

// max(0, 1 - (2 beta)^T / T!) with T = e_h * e_w, evaluated in log space.
double Prop1Bound(double beta, int e_h, int e_w);

// Fraction of trials in which a uniform [0,1]^T pattern lies at L1 distance
// greater than beta from a fixed uniform trigger (single alignment).
double Prop1MonteCarlo(double beta, int e_h, int e_w, int64_t trials, uint64_t seed);

struct ItemOutcome {
  std::string name;
  bool is_trojaned = false;
  bool flagged = false;
  int label = -1;
  int predicted = -1;  // -1 when no classifier ran
  std::size_t argmin_index = 0;
};

struct MetricsReport {
  std::size_t clean_total = 0;
  std::size_t clean_flagged = 0;
  std::size_t trojaned_total = 0;
  std::size_t trojaned_missed = 0;
  std::optional<double> fpr;
  std::optional<double> fnr;

  std::size_t acc_total = 0;
  std::size_t acc_correct = 0;
  std::size_t asr_total = 0;
  std::size_t asr_hits = 0;
  std::optional<double> acc;
  std::optional<double> asr;

  nlohmann::json config;
  std::vector<ItemOutcome> items;
};

struct EvalOptions {
  // Worker threads for per-item evaluation; results are order-independent.
  int threads = 1;
};

// FPR = clean flagged / clean total; FNR = trojaned missed / trojaned
// total, left empty when the corpus has no trojaned items (or no clean ones
// for FPR). Throws kEmptyCorpus on an empty corpus.
MetricsReport EvalDetection(const LabeledCorpus& corpus, const Encoder& enc,
                            const DetectionConfig& cfg, const EvalOptions& options = {});

// Cosine nearest centroid; ties go to the lower label.
int NearestCentroid(const FeatureVector& f, std::span<const FeatureVector> centroids);

// Mean feature per label over the given items (labels 0..num_classes-1).
// Throws kMissingCentroid if a label has no items.
std::vector<FeatureVector> ClassCentroids(const Encoder& enc, const LabeledCorpus& corpus,
                                          int num_classes);

struct EndToEndOptions {
  bool defense = true;
  RestoreConfig restore;
  EvalOptions eval;
};

// detect -> restore -> features -> nearest centroid. ACC over clean items
// against their labels; ASR over trojaned items as the fraction predicted
// as their target label. With defense=false images go straight to the
// classifier. Detection counts are filled in when defense is on.
MetricsReport EvalEndToEnd(const LabeledCorpus& corpus, const Encoder& enc,
                           const DetectionConfig& cfg,
                           std::span<const FeatureVector> centroids,
                           const EndToEndOptions& options = {});

nlohmann::json ReportToJson(const MetricsReport& report);
// name,is_trojaned,flagged,label,predicted,argmin_index per line.
std::string ReportItemsCsv(const MetricsReport& report);

}  // namespace trojandec

#endif  // TROJANDEC_EVALUATION_H_
