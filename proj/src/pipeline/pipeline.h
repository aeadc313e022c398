// pipeline/pipeline.h

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

#ifndef SERKIT_PIPELINE_PIPELINE_H_
#define SERKIT_PIPELINE_PIPELINE_H_

#include <array>
#include <map>
#include <string>
#include <vector>

#include "augment/augment.h"
#include "corpus/manifest.h"
#include "eval/metrics.h"
#include "nn/model.h"
#include "nlohmann/json.hpp"
#include "train/trainer.h"

namespace serkit::pipeline {

// Everything one experiment needs, serialized into the run directory
// before execution so a run can be replayed from its snapshot.
struct RunConfig {
  std::string corpus_dir;    // manifest.jsonl + wav files
  std::string assets_dir;    // noise/ clips + ir/ + ego_noise.wav + test_rir.wav
  std::string degraded_dir;  // frozen degraded test corpus
  std::string run_dir;
  nn::ModelConfig model;
  train::TrainConfig train;
  augment::AugmentationConfig augment;
  bool augment_on = false;
  std::vector<int> folds;  // empty selects all ten
  int jobs = 1;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  void validate() const;
};

// Applies one `--key value` style override onto a JSON config. Keys use
// dots for nesting ("train.lr", "augment.nsr_hi"); values are parsed as
// JSON when possible and fall back to strings.
void apply_override(nlohmann::json* j, const std::string& key,
                    const std::string& value);

struct CorpusData {
  std::vector<corpus::UtteranceRecord> records;
  std::vector<train::TrainItem> items;  // aligned with records
};

// Reads dir/manifest.jsonl and loads every waveform at the canonical rate.
// Relative audio paths are resolved against the manifest's directory.
CorpusData load_corpus(const std::string& dir);

// Curated noise clips (stock tag filter applied to noise/clips.jsonl) plus
// the training impulse responses under irs/.
augment::AssetPool load_assets(const std::string& assets_dir);

struct FoldItems {
  std::vector<train::TrainItem> train;
  std::vector<train::TrainItem> val;
  std::vector<train::TrainItem> test;
};
FoldItems split_fold(const CorpusData& corpus, const eval::FoldSpec& fold);

std::string fold_dir(const std::string& run_dir, int fold_id);

struct FoldRunResult {
  int fold_id = -1;
  std::string dir;
  double best_metric = 0.0;
  int best_epoch = -1;
};

// Trains the selected folds, one directory per fold, snapshotting the
// materialized config first. Returns per-fold best validation results.
std::vector<FoldRunResult> run_training(const RunConfig& cfg,
                                        const CorpusData& corpus,
                                        const augment::AssetPool& pool);

// One fold's test-set evaluation. Categorical checkpoints fill `cat`,
// dimensional ones fill `dim`.
struct FoldScore {
  int fold_id = -1;
  bool categorical = true;
  eval::CategoricalMetrics cat;
  eval::DimensionalMetrics dim;
  size_t count = 0;
};

FoldScore evaluate_checkpoint(const std::string& ckpt_path,
                              const std::vector<train::TrainItem>& items);

// Evaluates every trained fold directory under run_dir against the given
// corpus; test items are the fold's held-out test speaker.
std::vector<FoldScore> evaluate_run(const std::string& run_dir,
                                    const CorpusData& corpus);

// Per-column mean and standard deviation over folds, plus the pooled
// confusion matrix for categorical runs. Column names follow the metric
// suite: uw_acc, uar, macro_f, arousal_mae, valence_mae, arousal_corr,
// valence_corr.
struct ScoreSummary {
  std::map<std::string, double> mean;
  std::map<std::string, double> stddev;
  std::array<std::array<long, 4>, 4> confusion{};
  size_t folds = 0;
};
ScoreSummary summarize_scores(const std::vector<FoldScore>& scores);

// Merge of two summaries' mean columns (e.g. a categorical run and a
// dimensional run of the same condition).
std::map<std::string, double> merge_columns(
    const std::map<std::string, double>& a,
    const std::map<std::string, double>& b);

// Four-row robustness summary with the derived gap and improvement rows.
// MAE columns flip the improvement sign so positive always means better.
struct RobustnessTable {
  std::map<std::string, double> base_clean, base_degraded;
  std::map<std::string, double> aug_clean, aug_degraded;
  std::map<std::string, double> base_gap, aug_gap, improvement;

  std::string to_csv() const;
  nlohmann::json to_json() const;
};
RobustnessTable build_robustness_table(
    const std::map<std::string, double>& base_clean,
    const std::map<std::string, double>& base_degraded,
    const std::map<std::string, double>& aug_clean,
    const std::map<std::string, double>& aug_degraded);

struct AblationRow {
  std::string variant;
  double clean_macro_f = 0.0;
  double degraded_macro_f = 0.0;
  double clean_delta_pct = 0.0;
  double degraded_delta_pct = 0.0;
};
struct AblationTable {
  std::vector<AblationRow> rows;
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

// Variant order used by the ablation driver: the all-on baseline followed
// by one row per excluded augmentation.
extern const std::array<const char*, 5> kAblationVariants;

// Returns a copy of cfg with one augmentation step switched off ("all"
// returns it unchanged).
augment::AugmentationConfig ablation_variant(
    const augment::AugmentationConfig& cfg, const std::string& variant);

// Trains baseline + four single-removal variants and scores each on the
// clean and degraded test corpora. Deltas are relative macro-F change
// against the all-on baseline.
AblationTable run_ablation(const RunConfig& cfg, const CorpusData& corpus,
                           const CorpusData& degraded,
                           const augment::AssetPool& pool);

}  // namespace serkit::pipeline

#endif  // SERKIT_PIPELINE_PIPELINE_H_
