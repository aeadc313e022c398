// train/trainer.cc

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

#include "train/trainer.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numeric>

#include "eval/metrics.h"
#include "feat/features.h"
#include "nn/loss.h"
#include "util/common.h"
#include "util/error.h"

namespace serkit::train {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string epoch_plan_path(const std::string& run_dir, int epoch) {
  char name[32];
  std::snprintf(name, sizeof(name), "epoch_%03d.jsonl", epoch);
  return run_dir + "/plans/" + name;
}

Eigen::VectorXd dimensional_target(const TrainItem& item) {
  Eigen::VectorXd t(2);
  t << item.arousal, item.valence;
  return t;
}

}  // namespace

void TrainConfig::validate() const {
  if (lr <= 0.0) throw ConfigError("learning rate must be positive");
  if (lr_factor <= 0.0 || lr_factor >= 1.0) {
    throw ConfigError("lr_factor must lie in (0, 1)");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (clip_lo > clip_hi) throw ConfigError("clip interval is inverted");
  if (plateau_patience < 1) throw ConfigError("plateau_patience must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (min_lr <= 0.0) throw ConfigError("min_lr must be positive");
}

void clip_gradients(const std::vector<nn::Parameter*>& params, double lo,
                    double hi) {
  for (auto* p : params) {
    if (p->g.hasNaN()) {
      throw DivergedError("NaN gradient in " + p->name);
    }
    p->g = p->g.cwiseMax(lo).cwiseMin(hi);
  }
}

void adam_step(AdamState* state, const std::vector<nn::Parameter*>& params,
               const TrainConfig& cfg, double lr) {
  state->t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state->t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state->t));
  for (auto* p : params) {
    auto mit = state->m.find(p->name);
    if (mit == state->m.end()) {
      mit = state->m.emplace(p->name,
                             Eigen::MatrixXd::Zero(p->w.rows(), p->w.cols()))
                .first;
      state->v.emplace(p->name,
                       Eigen::MatrixXd::Zero(p->w.rows(), p->w.cols()));
    }
    Eigen::MatrixXd& m = mit->second;
    Eigen::MatrixXd& v = state->v.at(p->name);
    if (m.rows() != p->w.rows() || m.cols() != p->w.cols()) {
      throw ConfigError("adam state shape mismatch for " + p->name);
    }
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * p->g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * p->g.cwiseProduct(p->g);
    p->w.array() -= lr * (m.array() / bc1) /
                    ((v.array() / bc2).sqrt() + cfg.eps);
  }
}

std::vector<std::vector<size_t>> make_batches(
    const std::vector<long>& frame_counts, int epoch, int batch_size,
    Rng& rng) {
  const size_t n = frame_counts.size();
  if (n == 0) throw DataError("no utterances to batch");
  std::vector<size_t> order(n);
  if (epoch == 0) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return frame_counts[a] < frame_counts[b];
    });
  } else {
    order = rng.permutation(n);
  }
  std::vector<std::vector<size_t>> batches;
  for (size_t at = 0; at < n; at += batch_size) {
    const size_t take = std::min<size_t>(batch_size, n - at);
    batches.emplace_back(order.begin() + at, order.begin() + at + take);
  }
  return batches;
}

namespace {

struct RunState {
  std::unique_ptr<nn::Model> model;
  AdamState adam;
  feat::Normalizer norm;
  double lr = 0.0;
  int next_epoch = 0;
  double best_metric = kNegInf;
  int best_epoch = -1;
  int plateau = 0;
  std::vector<EpochStats> history;
};

nn::Checkpoint compose_checkpoint(const FitOptions& opts, const RunState& st,
                                  int completed_epoch) {
  nn::Checkpoint ckpt;
  ckpt.meta["model_config"] =
      nlohmann::json::parse(opts.model.to_json());
  ckpt.meta["epoch"] = completed_epoch;
  ckpt.meta["lr"] = st.lr;
  ckpt.meta["best_metric"] =
      st.best_epoch >= 0 ? st.best_metric : 0.0;
  ckpt.meta["has_best"] = st.best_epoch >= 0;
  ckpt.meta["best_epoch"] = st.best_epoch;
  ckpt.meta["plateau"] = st.plateau;
  ckpt.meta["seed"] = opts.train.seed;
  ckpt.meta["augment_on"] = opts.augment_on;
  ckpt.meta["normalizer_sources"] = st.norm.source_ids();
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& h : st.history) {
    hist.push_back({{"epoch", h.epoch},
                    {"train_loss", h.train_loss},
                    {"val_metric", h.val_metric},
                    {"lr", h.lr}});
  }
  ckpt.meta["history"] = hist;

  ckpt.tensors = st.model->tensor_map();
  for (const auto& [name, m] : st.adam.m) ckpt.tensors["adam/m/" + name] = m;
  for (const auto& [name, v] : st.adam.v) ckpt.tensors["adam/v/" + name] = v;
  Eigen::MatrixXd t(1, 1);
  t(0, 0) = static_cast<double>(st.adam.t);
  ckpt.tensors["adam/t"] = t;
  ckpt.tensors["norm/mean"] = st.norm.mean();
  ckpt.tensors["norm/std"] = st.norm.std_dev();
  return ckpt;
}

void restore_state(const nn::Checkpoint& ckpt, const FitOptions& opts,
                   RunState* st) {
  const nn::ModelConfig saved =
      nn::ModelConfig::from_json(ckpt.meta.at("model_config").dump());
  if (saved.to_json() != opts.model.to_json()) {
    throw ConfigError("resume checkpoint was trained with a different model");
  }
  st->model->load_tensors(ckpt.tensors);
  st->adam.t = static_cast<int64_t>(ckpt.tensors.at("adam/t")(0, 0));
  for (auto* p : st->model->trainable_params()) {
    st->adam.m[p->name] = ckpt.tensors.at("adam/m/" + p->name);
    st->adam.v[p->name] = ckpt.tensors.at("adam/v/" + p->name);
  }
  std::vector<std::string> sources;
  for (const auto& s : ckpt.meta.at("normalizer_sources")) {
    sources.push_back(s.get<std::string>());
  }
  st->norm.set_state(ckpt.tensors.at("norm/mean"),
                     ckpt.tensors.at("norm/std"), std::move(sources));
  st->next_epoch = ckpt.meta.at("epoch").get<int>() + 1;
  st->lr = ckpt.meta.at("lr").get<double>();
  if (ckpt.meta.value("has_best", false)) {
    st->best_metric = ckpt.meta.at("best_metric").get<double>();
  }
  st->best_epoch = ckpt.meta.at("best_epoch").get<int>();
  st->plateau = ckpt.meta.at("plateau").get<int>();
  for (const auto& h : ckpt.meta.at("history")) {
    st->history.push_back({h.at("epoch").get<int>(),
                           h.at("train_loss").get<double>(),
                           h.at("val_metric").get<double>(),
                           h.at("lr").get<double>()});
  }
}

void write_history_csv(const std::string& run_dir,
                       const std::vector<EpochStats>& history) {
  std::string csv = "epoch,train_loss,val_metric,lr\n";
  for (const auto& h : history) {
    csv += std::to_string(h.epoch) + "," + std::to_string(h.train_loss) +
           "," + std::to_string(h.val_metric) + "," + std::to_string(h.lr) +
           "\n";
  }
  write_text_file(run_dir + "/history.csv", csv);
}

double validation_metric(nn::Model* model,
                         const std::vector<feat::FeatureMatrix>& feats,
                         const std::vector<TrainItem>& items) {
  if (model->config().head == nn::Head::kCategorical) {
    std::vector<int> preds, targets;
    for (size_t i = 0; i < items.size(); ++i) {
      const Eigen::VectorXd p =
          model->predict(feats[i].frames, feats[i].frames.rows());
      int arg = 0;
      p.maxCoeff(&arg);
      preds.push_back(arg);
      targets.push_back(static_cast<int>(items[i].label));
    }
    return eval::categorical_metrics(preds, targets).macro_f;
  }
  std::vector<std::array<double, 2>> preds, targets;
  for (size_t i = 0; i < items.size(); ++i) {
    const Eigen::VectorXd p =
        model->predict(feats[i].frames, feats[i].frames.rows());
    preds.push_back({p(0), p(1)});
    targets.push_back({items[i].arousal, items[i].valence});
  }
  const auto m = eval::dimensional_metrics(preds, targets);
  return -(m.arousal_mae + m.valence_mae);
}

}  // namespace

double score_validation(nn::Model* model, const feat::Normalizer& norm,
                        const std::vector<TrainItem>& items) {
  std::vector<feat::FeatureMatrix> feats;
  feats.reserve(items.size());
  for (const auto& item : items) {
    feats.push_back(norm.apply(feat::extract(item.wave)));
  }
  return validation_metric(model, feats, items);
}

FitResult fit(const FitOptions& opts, const std::vector<TrainItem>& train_set,
              const std::vector<TrainItem>& val_set,
              const augment::AssetPool& pool) {
  opts.model.validate();
  opts.train.validate();
  if (opts.augment_on) opts.augment.validate();
  if (train_set.empty()) throw DataError("empty training fold");
  if (val_set.empty()) throw DataError("empty validation fold");

  const bool persist = !opts.run_dir.empty();
  if (persist) {
    std::filesystem::create_directories(opts.run_dir);
    if (opts.augment_on) {
      std::filesystem::create_directories(opts.run_dir + "/plans");
    }
  }

  RunState st;
  st.model = nn::make_model(opts.model, opts.train.seed);
  st.lr = opts.train.lr;

  // Clean features are the reference copy: they feed the normalizer fit,
  // every epoch when augmentation is off, and validation always.
  std::vector<feat::FeatureMatrix> train_clean(train_set.size());
  for (size_t i = 0; i < train_set.size(); ++i) {
    train_clean[i] = feat::extract(train_set[i].wave);
  }

  nn::Checkpoint best_ckpt;
  bool have_best = false;

  if (opts.resume_from) {
    const nn::Checkpoint last = nn::Checkpoint::load(*opts.resume_from);
    restore_state(last, opts, &st);
    const std::string best_path =
        (std::filesystem::path(*opts.resume_from).parent_path() / "best.ckpt")
            .string();
    if (st.best_epoch >= 0 && std::filesystem::exists(best_path)) {
      best_ckpt = nn::Checkpoint::load(best_path);
      have_best = true;
    }
  } else {
    std::vector<const feat::FeatureMatrix*> refs;
    std::vector<std::string> ids;
    for (size_t i = 0; i < train_set.size(); ++i) {
      refs.push_back(&train_clean[i]);
      ids.push_back(train_set[i].id);
    }
    st.norm.fit(refs, ids);
  }

  for (auto& f : train_clean) f = st.norm.apply(f);
  std::vector<feat::FeatureMatrix> val_feats(val_set.size());
  for (size_t i = 0; i < val_set.size(); ++i) {
    val_feats[i] = st.norm.apply(feat::extract(val_set[i].wave));
  }

  Rng root(opts.train.seed);
  const auto trainables = st.model->trainable_params();

  for (int e = st.next_epoch; e < opts.train.max_epochs; ++e) {
    // Assemble this epoch's training features.
    std::vector<feat::FeatureMatrix> epoch_feats;
    epoch_feats.reserve(train_set.size());
    std::string plan_log;
    if (opts.augment_on) {
      const int plan_epoch = opts.augment.resample_per_epoch ? e : 0;
      for (const auto& item : train_set) {
        Rng plan_rng = root.split("plan/" + item.id,
                                  static_cast<uint64_t>(plan_epoch));
        const augment::AugmentationPlan plan =
            sample_plan(opts.augment, plan_rng);
        nlohmann::json entry = nlohmann::json::parse(plan.to_json());
        entry["id"] = item.id;
        plan_log += entry.dump();
        plan_log += "\n";
        try {
          const audio::Waveform aug = apply_plan(item.wave, plan, pool);
          epoch_feats.push_back(st.norm.apply(feat::extract(aug)));
        } catch (const std::exception& ex) {
          throw DataError(item.id + ": augmentation failed: " + ex.what());
        }
      }
      if (persist) write_text_file(epoch_plan_path(opts.run_dir, e), plan_log);
    } else {
      epoch_feats = train_clean;
    }

    std::vector<long> counts(train_set.size());
    for (size_t i = 0; i < counts.size(); ++i) {
      counts[i] = epoch_feats[i].frames.rows();
    }
    Rng shuffle_rng = root.split("shuffle", static_cast<uint64_t>(e));
    const auto batches =
        make_batches(counts, e, opts.train.batch_size, shuffle_rng);

    double loss_sum = 0.0;
    for (const auto& batch : batches) {
      st.model->zero_grad();
      std::vector<const Eigen::MatrixXd*> xs;
      std::vector<long> masks;
      for (size_t idx : batch) {
        xs.push_back(&epoch_feats[idx].frames);
        masks.push_back(epoch_feats[idx].frames.rows());
      }
      const auto outs = st.model->forward_batch(xs, masks, nn::Mode::kTrain);
      std::vector<Eigen::VectorXd> douts(batch.size());
      for (size_t i = 0; i < batch.size(); ++i) {
        const TrainItem& item = train_set[batch[i]];
        nn::LossResult lr_result;
        if (opts.model.head == nn::Head::kCategorical) {
          lr_result = nn::softmax_cross_entropy(
              outs[i], static_cast<int>(item.label));
        } else {
          lr_result = nn::l1_loss(outs[i], dimensional_target(item));
        }
        if (!std::isfinite(lr_result.loss)) {
          throw DivergedError("non-finite loss at epoch " +
                              std::to_string(e));
        }
        loss_sum += lr_result.loss;
        douts[i] = lr_result.dpred / static_cast<double>(batch.size());
      }
      st.model->backward_batch(douts);
      clip_gradients(trainables, opts.train.clip_lo, opts.train.clip_hi);
      adam_step(&st.adam, trainables, opts.train, st.lr);
    }

    const double val_metric =
        validation_metric(st.model.get(), val_feats, val_set);
    EpochStats stats;
    stats.epoch = e;
    stats.train_loss = loss_sum / static_cast<double>(train_set.size());
    stats.val_metric = val_metric;
    stats.lr = st.lr;
    st.history.push_back(stats);

    bool stop = false;
    if (val_metric > st.best_metric) {
      st.best_metric = val_metric;
      st.best_epoch = e;
      st.plateau = 0;
      best_ckpt = compose_checkpoint(opts, st, e);
      have_best = true;
      if (persist) best_ckpt.save(opts.run_dir + "/best.ckpt");
    } else {
      ++st.plateau;
      if (st.plateau >= opts.train.plateau_patience) {
        st.lr *= opts.train.lr_factor;
        st.plateau = 0;
        if (st.lr < opts.train.min_lr) stop = true;
      }
    }

    if (persist) {
      compose_checkpoint(opts, st, e).save(opts.run_dir + "/last.ckpt");
      write_history_csv(opts.run_dir, st.history);
    }
    if (stop) break;
  }

  FitResult result;
  result.last = compose_checkpoint(
      opts, st, st.history.empty() ? -1 : st.history.back().epoch);
  result.best = have_best ? best_ckpt : result.last;
  result.history = st.history;
  result.best_metric = st.best_epoch >= 0 ? st.best_metric : 0.0;
  result.best_epoch = st.best_epoch;
  return result;
}

}  // namespace serkit::train
