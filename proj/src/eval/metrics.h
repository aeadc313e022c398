// eval/metrics.h

// Copyright 2026  serkit contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the Apache 2 License for the specific language governing permissions
// and limitations under the License.

#ifndef SERKIT_EVAL_METRICS_H_
#define SERKIT_EVAL_METRICS_H_

#include <array>
#include <optional>
#include <vector>

#include "corpus/manifest.h"

namespace serkit::eval {

struct CategoricalMetrics {
  // confusion[target][pred]; row sums are per-class test counts.
  std::array<std::array<long, corpus::kNumClasses>, corpus::kNumClasses>
      confusion{};
  double uw_acc = 0.0;   // overall accuracy
  double uar = 0.0;      // mean per-class recall
  double macro_f = 0.0;  // mean per-class F1; absent classes count as 0
};

CategoricalMetrics categorical_metrics(const std::vector<int>& preds,
                                       const std::vector<int>& targets);

struct DimensionalMetrics {
  double arousal_mae = 0.0;
  double valence_mae = 0.0;
  // Pearson r; missing (not 0) when either side has zero variance.
  std::optional<double> arousal_corr;
  std::optional<double> valence_corr;
};

// Pairs are (arousal, valence).
DimensionalMetrics dimensional_metrics(
    const std::vector<std::array<double, 2>>& preds,
    const std::vector<std::array<double, 2>>& targets);

// (degraded - clean) / clean * 100.
double gap_percent(double clean, double degraded);

// (augmented - baseline) / baseline * 100.
double improvement_percent(double baseline, double augmented);

struct FoldSpec {
  int fold_id = 0;
  std::vector<int> train_sessions;
  int held_session = 0;
  std::string val_speaker;
  std::string test_speaker;
};

// Leave-one-speaker-out over a 5-session, 2-speakers-per-session corpus:
// each speaker is the test speaker exactly once while the other speaker of
// the held-out session validates, giving ten folds.
std::vector<FoldSpec> make_loso_folds(
    const std::vector<corpus::UtteranceRecord>& records);

}  // namespace serkit::eval

#endif  // SERKIT_EVAL_METRICS_H_
