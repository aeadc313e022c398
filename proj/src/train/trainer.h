// train/trainer.h

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

#ifndef SERKIT_TRAIN_TRAINER_H_
#define SERKIT_TRAIN_TRAINER_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "augment/augment.h"
#include "corpus/manifest.h"
#include "feat/normalizer.h"
#include "nn/checkpoint.h"
#include "nn/model.h"
#include "util/rng.h"

namespace serkit::train {

struct TrainConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_lo = -1.0;
  double clip_hi = 1.0;
  int batch_size = 32;
  int plateau_patience = 3;
  double lr_factor = 0.5;
  int max_epochs = 100;
  double min_lr = 1e-6;
  uint64_t seed = 0;

  void validate() const;
};

// Element-wise clamp of every trainable gradient; a NaN anywhere means the
// run has diverged and must stop.
void clip_gradients(const std::vector<nn::Parameter*>& params, double lo,
                    double hi);

struct AdamState {
  int64_t t = 0;
  std::map<std::string, Eigen::MatrixXd> m;
  std::map<std::string, Eigen::MatrixXd> v;
};

// Bias-corrected Adam over the trainable parameters using their
// accumulated gradients.
void adam_step(AdamState* state, const std::vector<nn::Parameter*>& params,
               const TrainConfig& cfg, double lr);

// Epoch 0 presents utterances sorted ascending by frame count; later
// epochs shuffle uniformly. Output is index batches of at most batch_size.
std::vector<std::vector<size_t>> make_batches(
    const std::vector<long>& frame_counts, int epoch, int batch_size,
    Rng& rng);

struct TrainItem {
  std::string id;
  audio::Waveform wave;
  corpus::Label label = corpus::Label::kNeutral;
  double arousal = 3.0;
  double valence = 3.0;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_metric = 0.0;
  double lr = 0.0;
};

struct FitResult {
  nn::Checkpoint best;
  nn::Checkpoint last;
  std::vector<EpochStats> history;
  double best_metric = 0.0;
  int best_epoch = -1;
};

struct FitOptions {
  nn::ModelConfig model;
  TrainConfig train;
  augment::AugmentationConfig augment;
  bool augment_on = false;
  // When non-empty, per-epoch plans, history CSV, and best/last checkpoints
  // are written here.
  std::string run_dir;
  // Resume from a last-checkpoint; continues bit-exactly as if the run had
  // never stopped.
  std::optional<std::string> resume_from;
};

// Full training loop: per epoch (re)samples augmentation plans, extracts
// and normalizes features (statistics from the training fold's clean audio
// only, frozen at epoch 0), steps Adam over SortaGrad batches, scores the
// validation items (macro F for categorical heads, negative summed MAE for
// dimensional), and halves the learning rate after plateau_patience epochs
// without improvement. Stops at max_epochs or once lr falls below min_lr.
FitResult fit(const FitOptions& opts, const std::vector<TrainItem>& train_set,
              const std::vector<TrainItem>& val_set,
              const augment::AssetPool& pool);

// Validation metric for one item set under the given model + normalizer.
double score_validation(nn::Model* model, const feat::Normalizer& norm,
                        const std::vector<TrainItem>& items);

}  // namespace serkit::train

#endif  // SERKIT_TRAIN_TRAINER_H_
