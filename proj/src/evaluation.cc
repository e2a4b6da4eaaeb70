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

#include "trojandec/evaluation.h"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <tuple>

#include "trojandec/error.h"
#include "trojandec/parallel.h"
#include "trojandec/rng.h"
#include "trojandec/simd/kernels.h"

namespace trojandec {
namespace {

// Mask sets keyed by (t, channels); every item of a given geometry shares
// the same masks, as generated from the detection seed.
class MaskSetCache {
 public:
  explicit MaskSetCache(const DetectionConfig& cfg) : cfg_(cfg) {}

  const MaskSet& Get(const Image& img) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(img.size(), img.channels());
    auto it = sets_.find(key);
    if (it == sets_.end()) {
      it = sets_.emplace(key, std::make_unique<MaskSet>(cfg_.k, cfg_.s, img.size(),
                                                        img.channels(), cfg_.seed))
               .first;
    }
    return *it->second;
  }

 private:
  DetectionConfig cfg_;
  std::mutex mu_;
  std::map<std::pair<int, int>, std::unique_ptr<MaskSet>> sets_;
};

nlohmann::json ConfigEcho(const DetectionConfig& cfg, const Encoder& enc) {
  return {{"k", cfg.k},
          {"s", cfg.s},
          {"B", cfg.b},
          {"seed", cfg.seed},
          {"encoder", std::string(EncoderKindName(enc.kind()))}};
}

void FillRates(MetricsReport& report) {
  report.fpr.reset();
  report.fnr.reset();
  report.acc.reset();
  report.asr.reset();
  if (report.clean_total > 0) {
    report.fpr = static_cast<double>(report.clean_flagged) / report.clean_total;
  }
  if (report.trojaned_total > 0) {
    report.fnr = static_cast<double>(report.trojaned_missed) / report.trojaned_total;
  }
  if (report.acc_total > 0) {
    report.acc = static_cast<double>(report.acc_correct) / report.acc_total;
  }
  if (report.asr_total > 0) {
    report.asr = static_cast<double>(report.asr_hits) / report.asr_total;
  }
}

nlohmann::json OptionalRate(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

double Prop1Bound(double beta, int e_h, int e_w) {
  if (beta < 0.0 || e_h < 1 || e_w < 1) {
    throw Error(ErrorCode::kInvalidConfig, "need beta >= 0 and e_h, e_w >= 1");
  }
  if (beta == 0.0) return 1.0;
  const double t = static_cast<double>(e_h) * e_w;
  const double log_ball = t * std::log(2.0 * beta) - std::lgamma(t + 1.0);
  return std::max(0.0, 1.0 - std::exp(log_ball));
}

double Prop1MonteCarlo(double beta, int e_h, int e_w, int64_t trials, uint64_t seed) {
  if (trials < 1 || beta < 0.0 || e_h < 1 || e_w < 1) {
    throw Error(ErrorCode::kInvalidConfig, "need trials >= 1, beta >= 0, e_h, e_w >= 1");
  }
  const std::size_t t = static_cast<std::size_t>(e_h) * e_w;
  Rng trigger_rng(DeriveSeed(seed, {1}));
  std::vector<double> trigger(t);
  for (double& x : trigger) x = trigger_rng.Uniform();
  Rng rng(DeriveSeed(seed, {2}));
  int64_t far = 0;
  for (int64_t i = 0; i < trials; ++i) {
    double l1 = 0.0;
    for (std::size_t j = 0; j < t; ++j) l1 += std::abs(rng.Uniform() - trigger[j]);
    if (l1 > beta) ++far;
  }
  return static_cast<double>(far) / static_cast<double>(trials);
}

MetricsReport EvalDetection(const LabeledCorpus& corpus, const Encoder& enc,
                            const DetectionConfig& cfg, const EvalOptions& options) {
  if (corpus.items.empty()) throw Error(ErrorCode::kEmptyCorpus, "no items to evaluate");
  MaskSetCache masks(cfg);
  std::vector<ItemOutcome> outcomes(corpus.items.size());
  ParallelFor(corpus.items.size(), options.threads, [&](std::size_t i) {
    const auto& item = corpus.items[i];
    const auto verdict = Detect(item.image, enc, masks.Get(item.image), cfg);
    outcomes[i] = {item.name, item.is_trojaned, verdict.is_trojaned, item.label, -1,
                   verdict.argmin_index};
  });

  MetricsReport report;
  report.config = ConfigEcho(cfg, enc);
  for (const auto& o : outcomes) {
    if (o.is_trojaned) {
      ++report.trojaned_total;
      if (!o.flagged) ++report.trojaned_missed;
    } else {
      ++report.clean_total;
      if (o.flagged) ++report.clean_flagged;
    }
  }
  report.items = std::move(outcomes);
  FillRates(report);
  return report;
}

int NearestCentroid(const FeatureVector& f, std::span<const FeatureVector> centroids) {
  if (centroids.empty()) throw Error(ErrorCode::kMissingCentroid, "no centroids");
  int best = 0;
  double best_sim = -2.0;
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double sim = CosineSimilarity(f, centroids[c]);
    if (sim > best_sim) {
      best_sim = sim;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::vector<FeatureVector> ClassCentroids(const Encoder& enc, const LabeledCorpus& corpus,
                                          int num_classes) {
  std::vector<FeatureVector> sums(num_classes, FeatureVector{std::vector<double>(enc.dim())});
  std::vector<std::size_t> counts(num_classes, 0);
  for (const auto& item : corpus.items) {
    if (item.label < 0 || item.label >= num_classes) continue;
    const FeatureVector f = enc.Features(item.image);
    for (std::size_t i = 0; i < f.dim(); ++i) sums[item.label].values[i] += f.values[i];
    ++counts[item.label];
  }
  for (int c = 0; c < num_classes; ++c) {
    if (counts[c] == 0) {
      throw Error(ErrorCode::kMissingCentroid, "no items for label " + std::to_string(c));
    }
    for (double& v : sums[c].values) v /= static_cast<double>(counts[c]);
  }
  return sums;
}

MetricsReport EvalEndToEnd(const LabeledCorpus& corpus, const Encoder& enc,
                           const DetectionConfig& cfg,
                           std::span<const FeatureVector> centroids,
                           const EndToEndOptions& options) {
  if (corpus.items.empty()) throw Error(ErrorCode::kEmptyCorpus, "no items to evaluate");
  for (const auto& item : corpus.items) {
    const int needed = item.is_trojaned ? item.target_label : item.label;
    if (needed < 0 || static_cast<std::size_t>(needed) >= centroids.size()) {
      throw Error(ErrorCode::kMissingCentroid,
                  item.name + " needs a centroid for label " + std::to_string(needed));
    }
  }
  MaskSetCache masks(cfg);
  std::vector<ItemOutcome> outcomes(corpus.items.size());
  ParallelFor(corpus.items.size(), options.eval.threads, [&](std::size_t i) {
    const auto& item = corpus.items[i];
    ItemOutcome o{item.name, item.is_trojaned, false, item.label, -1, 0};
    Image input = item.image;
    if (options.defense) {
      const MaskSet& set = masks.Get(item.image);
      const auto verdict = Detect(item.image, enc, set, cfg);
      o.flagged = verdict.is_trojaned;
      o.argmin_index = verdict.argmin_index;
      input = Restore(item.image, verdict, set, options.restore).image;
    }
    o.predicted = NearestCentroid(enc.Features(input), centroids);
    outcomes[i] = std::move(o);
  });

  MetricsReport report;
  report.config = ConfigEcho(cfg, enc);
  report.config["defense"] = options.defense;
  report.config["strategy"] = std::string(RestoreStrategyName(options.restore.strategy));
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    const auto& item = corpus.items[i];
    if (o.is_trojaned) {
      ++report.asr_total;
      if (o.predicted == item.target_label) ++report.asr_hits;
      if (options.defense) {
        ++report.trojaned_total;
        if (!o.flagged) ++report.trojaned_missed;
      }
    } else {
      ++report.acc_total;
      if (o.predicted == item.label) ++report.acc_correct;
      if (options.defense) {
        ++report.clean_total;
        if (o.flagged) ++report.clean_flagged;
      }
    }
  }
  report.items = std::move(outcomes);
  FillRates(report);
  return report;
}

nlohmann::json ReportToJson(const MetricsReport& report) {
  return {
      {"fpr", OptionalRate(report.fpr)},
      {"fnr", OptionalRate(report.fnr)},
      {"acc", OptionalRate(report.acc)},
      {"asr", OptionalRate(report.asr)},
      {"counts",
       {{"clean_total", report.clean_total},
        {"clean_flagged", report.clean_flagged},
        {"trojaned_total", report.trojaned_total},
        {"trojaned_missed", report.trojaned_missed},
        {"acc_total", report.acc_total},
        {"acc_correct", report.acc_correct},
        {"asr_total", report.asr_total},
        {"asr_hits", report.asr_hits}}},
      {"config", report.config},
  };
}

std::string ReportItemsCsv(const MetricsReport& report) {
  std::ostringstream out;
  out << "name,is_trojaned,flagged,label,predicted,argmin_index\n";
  for (const auto& o : report.items) {
    out << o.name << ',' << (o.is_trojaned ? 1 : 0) << ',' << (o.flagged ? 1 : 0) << ','
        << o.label << ',' << o.predicted << ',' << o.argmin_index << '\n';
  }
  return out.str();
}

}  // namespace trojandec
