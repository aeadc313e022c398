// pipeline/pipeline.cc

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

#include "pipeline/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "audio/wav_io.h"
#include "feat/features.h"
#include "feat/normalizer.h"
#include "nn/checkpoint.h"
#include "util/common.h"
#include "util/error.h"

namespace fs = std::filesystem;

namespace serkit::pipeline {

namespace {

const std::array<const char*, 7> kColumns = {
    "uw_acc",      "uar",          "macro_f",     "arousal_mae",
    "valence_mae", "arousal_corr", "valence_corr"};

bool lower_is_better(const std::string& col) {
  return col == "arousal_mae" || col == "valence_mae";
}

std::string resolve_audio_path(const std::string& dir,
                               const std::string& path) {
  if (fs::exists(path)) return path;
  const std::string joined = (fs::path(dir) / path).string();
  if (fs::exists(joined)) return joined;
  throw DataError("audio file not found: " + path);
}

nlohmann::json augment_to_json(const augment::AugmentationConfig& a) {
  return {{"tempo_lo", a.tempo_lo},
          {"tempo_hi", a.tempo_hi},
          {"gain_lo_db", a.gain_lo_db},
          {"gain_hi_db", a.gain_hi_db},
          {"nsr_lo", a.nsr_lo},
          {"nsr_hi", a.nsr_hi},
          {"ir_pool", a.ir_pool},
          {"noise_pool", a.noise_pool},
          {"apply_prob", a.apply_prob},
          {"tempo_enabled", a.tempo_enabled},
          {"gain_enabled", a.gain_enabled},
          {"noise_enabled", a.noise_enabled},
          {"ir_enabled", a.ir_enabled},
          {"resample_per_epoch", a.resample_per_epoch},
          {"gaussian_enabled", a.gaussian_enabled},
          {"gaussian_sigma_lo", a.gaussian_sigma_lo},
          {"gaussian_sigma_hi", a.gaussian_sigma_hi}};
}

augment::AugmentationConfig augment_from_json(const nlohmann::json& j) {
  augment::AugmentationConfig a;
  a.tempo_lo = j.value("tempo_lo", a.tempo_lo);
  a.tempo_hi = j.value("tempo_hi", a.tempo_hi);
  a.gain_lo_db = j.value("gain_lo_db", a.gain_lo_db);
  a.gain_hi_db = j.value("gain_hi_db", a.gain_hi_db);
  a.nsr_lo = j.value("nsr_lo", a.nsr_lo);
  a.nsr_hi = j.value("nsr_hi", a.nsr_hi);
  a.ir_pool = j.value("ir_pool", a.ir_pool);
  a.noise_pool = j.value("noise_pool", a.noise_pool);
  a.apply_prob = j.value("apply_prob", a.apply_prob);
  a.tempo_enabled = j.value("tempo_enabled", a.tempo_enabled);
  a.gain_enabled = j.value("gain_enabled", a.gain_enabled);
  a.noise_enabled = j.value("noise_enabled", a.noise_enabled);
  a.ir_enabled = j.value("ir_enabled", a.ir_enabled);
  a.resample_per_epoch = j.value("resample_per_epoch", a.resample_per_epoch);
  a.gaussian_enabled = j.value("gaussian_enabled", a.gaussian_enabled);
  a.gaussian_sigma_lo = j.value("gaussian_sigma_lo", a.gaussian_sigma_lo);
  a.gaussian_sigma_hi = j.value("gaussian_sigma_hi", a.gaussian_sigma_hi);
  return a;
}

nlohmann::json train_to_json(const train::TrainConfig& t) {
  return {{"lr", t.lr},
          {"beta1", t.beta1},
          {"beta2", t.beta2},
          {"eps", t.eps},
          {"clip_lo", t.clip_lo},
          {"clip_hi", t.clip_hi},
          {"batch_size", t.batch_size},
          {"plateau_patience", t.plateau_patience},
          {"lr_factor", t.lr_factor},
          {"max_epochs", t.max_epochs},
          {"min_lr", t.min_lr},
          {"seed", t.seed}};
}

train::TrainConfig train_from_json(const nlohmann::json& j) {
  train::TrainConfig t;
  t.lr = j.value("lr", t.lr);
  t.beta1 = j.value("beta1", t.beta1);
  t.beta2 = j.value("beta2", t.beta2);
  t.eps = j.value("eps", t.eps);
  t.clip_lo = j.value("clip_lo", t.clip_lo);
  t.clip_hi = j.value("clip_hi", t.clip_hi);
  t.batch_size = j.value("batch_size", t.batch_size);
  t.plateau_patience = j.value("plateau_patience", t.plateau_patience);
  t.lr_factor = j.value("lr_factor", t.lr_factor);
  t.max_epochs = j.value("max_epochs", t.max_epochs);
  t.min_lr = j.value("min_lr", t.min_lr);
  t.seed = j.value("seed", t.seed);
  return t;
}

std::string csv_cell(const std::map<std::string, double>& row,
                     const std::string& col) {
  auto it = row.find(col);
  if (it == row.end()) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", it->second);
  return buf;
}

std::string csv_row(const std::string& name,
                    const std::map<std::string, double>& row) {
  std::string out = name;
  for (const char* col : kColumns) {
    out += ",";
    out += csv_cell(row, col);
  }
  out += "\n";
  return out;
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
  return {{"corpus_dir", corpus_dir},
          {"assets_dir", assets_dir},
          {"degraded_dir", degraded_dir},
          {"run_dir", run_dir},
          {"model", nlohmann::json::parse(model.to_json())},
          {"train", train_to_json(train)},
          {"augment", augment_to_json(augment)},
          {"augment_on", augment_on},
          {"folds", folds},
          {"jobs", jobs}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  c.corpus_dir = j.value("corpus_dir", std::string());
  c.assets_dir = j.value("assets_dir", std::string());
  c.degraded_dir = j.value("degraded_dir", std::string());
  c.run_dir = j.value("run_dir", std::string());
  if (j.contains("model")) {
    c.model = nn::ModelConfig::from_json(j.at("model").dump());
  }
  if (j.contains("train")) c.train = train_from_json(j.at("train"));
  if (j.contains("augment")) c.augment = augment_from_json(j.at("augment"));
  c.augment_on = j.value("augment_on", false);
  c.folds = j.value("folds", std::vector<int>());
  c.jobs = j.value("jobs", 1);
  return c;
}

void RunConfig::validate() const {
  model.validate();
  train.validate();
  if (augment_on) augment.validate();
  for (int f : folds) {
    if (f < 0 || f > 9) throw ConfigError("fold id outside 0..9");
  }
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

void apply_override(nlohmann::json* j, const std::string& key,
                    const std::string& value) {
  nlohmann::json* at = j;
  size_t start = 0;
  while (true) {
    const size_t dot = key.find('.', start);
    const std::string part = key.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("bad override key: " + key);
    if (dot == std::string::npos) {
      nlohmann::json parsed =
          nlohmann::json::parse(value, nullptr, /*allow_exceptions=*/false);
      (*at)[part] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
      return;
    }
    at = &(*at)[part];
    start = dot + 1;
  }
}

CorpusData load_corpus(const std::string& dir) {
  CorpusData data;
  data.records = corpus::read_manifest((fs::path(dir) / "manifest.jsonl").string());
  data.items.reserve(data.records.size());
  for (const auto& rec : data.records) {
    if (!rec.label) throw DataError("unlabeled utterance: " + rec.id);
    train::TrainItem item;
    item.id = rec.id;
    item.wave = audio::read_wav_at(resolve_audio_path(dir, rec.audio_path),
                                   audio::kCanonicalRateHz);
    item.label = *rec.label;
    item.arousal = rec.arousal.value_or(3.0);
    item.valence = rec.valence.value_or(3.0);
    data.items.push_back(std::move(item));
  }
  return data;
}

augment::AssetPool load_assets(const std::string& assets_dir) {
  augment::AssetPool pool;
  const std::string noise_dir = (fs::path(assets_dir) / "noise").string();
  const std::string index = (fs::path(noise_dir) / "clips.jsonl").string();
  const auto clips = corpus::read_clip_index(index);
  const auto kept = corpus::filter_noise(clips, corpus::default_tag_filter());
  for (const auto& clip : kept) {
    pool.add_noise(clip.id,
                   audio::read_wav_at(resolve_audio_path(noise_dir, clip.audio_path),
                                      audio::kCanonicalRateHz));
  }
  pool.load_ir_dir((fs::path(assets_dir) / "ir").string());
  return pool;
}

FoldItems split_fold(const CorpusData& corpus, const eval::FoldSpec& fold) {
  FoldItems out;
  const std::set<int> train_sessions(fold.train_sessions.begin(),
                                     fold.train_sessions.end());
  for (size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& rec = corpus.records[i];
    if (rec.speaker == fold.val_speaker) {
      out.val.push_back(corpus.items[i]);
    } else if (rec.speaker == fold.test_speaker) {
      out.test.push_back(corpus.items[i]);
    } else if (train_sessions.count(rec.session)) {
      out.train.push_back(corpus.items[i]);
    } else {
      throw DataError("utterance " + rec.id +
                      " belongs to no partition of fold " +
                      std::to_string(fold.fold_id));
    }
  }
  if (out.train.empty() || out.val.empty() || out.test.empty()) {
    throw DataError("fold " + std::to_string(fold.fold_id) +
                    " has an empty partition");
  }
  return out;
}

std::string fold_dir(const std::string& run_dir, int fold_id) {
  char name[16];
  std::snprintf(name, sizeof(name), "fold_%02d", fold_id);
  return (fs::path(run_dir) / name).string();
}

std::vector<FoldRunResult> run_training(const RunConfig& cfg,
                                        const CorpusData& corpus,
                                        const augment::AssetPool& pool) {
  RunConfig materialized = cfg;
  if (materialized.augment_on) {
    if (materialized.augment.noise_enabled &&
        materialized.augment.noise_pool.empty()) {
      materialized.augment.noise_pool = pool.noise_ids();
    }
    if (materialized.augment.ir_enabled &&
        materialized.augment.ir_pool.empty()) {
      materialized.augment.ir_pool = pool.ir_ids();
    }
  }
  materialized.validate();
  if (materialized.run_dir.empty()) {
    throw ConfigError("run_dir must be set for training");
  }

  fs::create_directories(materialized.run_dir);
  write_text_file((fs::path(materialized.run_dir) / "config.json").string(),
                  materialized.to_json().dump(2) + "\n");

  const auto folds = eval::make_loso_folds(corpus.records);
  std::vector<int> selected = materialized.folds;
  if (selected.empty()) {
    for (const auto& f : folds) selected.push_back(f.fold_id);
  }

  std::vector<FoldRunResult> results;
  for (int fold_id : selected) {
    const auto& fold = folds.at(fold_id);
    const FoldItems parts = split_fold(corpus, fold);
    train::FitOptions opts;
    opts.model = materialized.model;
    opts.train = materialized.train;
    opts.augment = materialized.augment;
    opts.augment_on = materialized.augment_on;
    opts.run_dir = fold_dir(materialized.run_dir, fold_id);
    const train::FitResult fit_result =
        train::fit(opts, parts.train, parts.val, pool);
    FoldRunResult r;
    r.fold_id = fold_id;
    r.dir = opts.run_dir;
    r.best_metric = fit_result.best_metric;
    r.best_epoch = fit_result.best_epoch;
    results.push_back(std::move(r));
  }

  nlohmann::json folds_json = nlohmann::json::array();
  for (const auto& r : results) {
    folds_json.push_back({{"fold_id", r.fold_id},
                          {"dir", r.dir},
                          {"best_metric", r.best_metric},
                          {"best_epoch", r.best_epoch}});
  }
  write_text_file((fs::path(materialized.run_dir) / "folds.json").string(),
                  folds_json.dump(2) + "\n");
  return results;
}

FoldScore evaluate_checkpoint(const std::string& ckpt_path,
                              const std::vector<train::TrainItem>& items) {
  if (items.empty()) throw DataError("no items to evaluate");
  const nn::Checkpoint ckpt = nn::Checkpoint::load(ckpt_path);
  const nn::ModelConfig mc =
      nn::ModelConfig::from_json(ckpt.meta.at("model_config").dump());
  auto model = nn::make_model(mc, 0);
  model->load_tensors(ckpt.tensors);
  feat::Normalizer norm;
  std::vector<std::string> sources;
  for (const auto& s : ckpt.meta.at("normalizer_sources")) {
    sources.push_back(s.get<std::string>());
  }
  norm.set_state(ckpt.tensors.at("norm/mean"), ckpt.tensors.at("norm/std"),
                 std::move(sources));

  FoldScore score;
  score.categorical = mc.head == nn::Head::kCategorical;
  score.count = items.size();
  if (score.categorical) {
    std::vector<int> preds, targets;
    for (const auto& item : items) {
      const feat::FeatureMatrix f = norm.apply(feat::extract(item.wave));
      const Eigen::VectorXd p = model->predict(f.frames, f.frames.rows());
      int arg = 0;
      p.maxCoeff(&arg);
      preds.push_back(arg);
      targets.push_back(static_cast<int>(item.label));
    }
    score.cat = eval::categorical_metrics(preds, targets);
  } else {
    std::vector<std::array<double, 2>> preds, targets;
    for (const auto& item : items) {
      const feat::FeatureMatrix f = norm.apply(feat::extract(item.wave));
      const Eigen::VectorXd p = model->predict(f.frames, f.frames.rows());
      preds.push_back({p(0), p(1)});
      targets.push_back({item.arousal, item.valence});
    }
    score.dim = eval::dimensional_metrics(preds, targets);
  }
  return score;
}

std::vector<FoldScore> evaluate_run(const std::string& run_dir,
                                    const CorpusData& corpus) {
  const auto folds = eval::make_loso_folds(corpus.records);
  std::vector<FoldScore> scores;
  for (const auto& fold : folds) {
    const std::string ckpt =
        (fs::path(fold_dir(run_dir, fold.fold_id)) / "best.ckpt").string();
    if (!fs::exists(ckpt)) continue;
    const FoldItems parts = split_fold(corpus, fold);
    FoldScore s = evaluate_checkpoint(ckpt, parts.test);
    s.fold_id = fold.fold_id;
    scores.push_back(std::move(s));
  }
  if (scores.empty()) {
    throw DataError("no trained fold checkpoints under " + run_dir);
  }
  return scores;
}

ScoreSummary summarize_scores(const std::vector<FoldScore>& scores) {
  if (scores.empty()) throw DataError("no fold scores to summarize");
  ScoreSummary out;
  out.folds = scores.size();
  std::map<std::string, std::vector<double>> cols;
  for (const auto& s : scores) {
    if (s.categorical) {
      cols["uw_acc"].push_back(s.cat.uw_acc);
      cols["uar"].push_back(s.cat.uar);
      cols["macro_f"].push_back(s.cat.macro_f);
      for (int t = 0; t < 4; ++t) {
        for (int p = 0; p < 4; ++p) out.confusion[t][p] += s.cat.confusion[t][p];
      }
    } else {
      cols["arousal_mae"].push_back(s.dim.arousal_mae);
      cols["valence_mae"].push_back(s.dim.valence_mae);
      if (s.dim.arousal_corr) cols["arousal_corr"].push_back(*s.dim.arousal_corr);
      if (s.dim.valence_corr) cols["valence_corr"].push_back(*s.dim.valence_corr);
    }
  }
  for (const auto& [name, values] : cols) {
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    out.mean[name] = mean;
    out.stddev[name] = std::sqrt(sq / static_cast<double>(values.size()));
  }
  return out;
}

std::map<std::string, double> merge_columns(
    const std::map<std::string, double>& a,
    const std::map<std::string, double>& b) {
  std::map<std::string, double> out = a;
  out.insert(b.begin(), b.end());
  return out;
}

RobustnessTable build_robustness_table(
    const std::map<std::string, double>& base_clean,
    const std::map<std::string, double>& base_degraded,
    const std::map<std::string, double>& aug_clean,
    const std::map<std::string, double>& aug_degraded) {
  RobustnessTable t;
  t.base_clean = base_clean;
  t.base_degraded = base_degraded;
  t.aug_clean = aug_clean;
  t.aug_degraded = aug_degraded;
  for (const char* col_name : kColumns) {
    const std::string col(col_name);
    const auto bc = base_clean.find(col);
    const auto bd = base_degraded.find(col);
    if (bc != base_clean.end() && bd != base_degraded.end() &&
        std::abs(bc->second) > 1e-12) {
      t.base_gap[col] = eval::gap_percent(bc->second, bd->second);
    }
    const auto ac = aug_clean.find(col);
    const auto ad = aug_degraded.find(col);
    if (ac != aug_clean.end() && ad != aug_degraded.end() &&
        std::abs(ac->second) > 1e-12) {
      t.aug_gap[col] = eval::gap_percent(ac->second, ad->second);
    }
    if (bd != base_degraded.end() && ad != aug_degraded.end() &&
        std::abs(bd->second) > 1e-12) {
      const double imp = eval::improvement_percent(bd->second, ad->second);
      t.improvement[col] = lower_is_better(col) ? -imp : imp;
    }
  }
  return t;
}

std::string RobustnessTable::to_csv() const {
  std::string out = "row";
  for (const char* col : kColumns) {
    out += ",";
    out += col;
  }
  out += "\n";
  out += csv_row("base_clean", base_clean);
  out += csv_row("base_degraded", base_degraded);
  out += csv_row("base_gap_pct", base_gap);
  out += csv_row("aug_clean", aug_clean);
  out += csv_row("aug_degraded", aug_degraded);
  out += csv_row("aug_gap_pct", aug_gap);
  out += csv_row("improvement_pct", improvement);
  return out;
}

nlohmann::json RobustnessTable::to_json() const {
  return {{"base_clean", base_clean},
          {"base_degraded", base_degraded},
          {"base_gap_pct", base_gap},
          {"aug_clean", aug_clean},
          {"aug_degraded", aug_degraded},
          {"aug_gap_pct", aug_gap},
          {"improvement_pct", improvement}};
}

const std::array<const char*, 5> kAblationVariants = {
    "all", "-tempo", "-gain", "-background_noise", "-rir"};

augment::AugmentationConfig ablation_variant(
    const augment::AugmentationConfig& cfg, const std::string& variant) {
  augment::AugmentationConfig out = cfg;
  if (variant == "all") return out;
  if (variant == "-tempo") {
    out.tempo_enabled = false;
  } else if (variant == "-gain") {
    out.gain_enabled = false;
  } else if (variant == "-background_noise") {
    out.noise_enabled = false;
  } else if (variant == "-rir") {
    out.ir_enabled = false;
  } else {
    throw ConfigError("unknown ablation variant: " + variant);
  }
  return out;
}

std::string AblationTable::to_csv() const {
  std::string out =
      "variant,clean_macro_f,degraded_macro_f,clean_delta_pct,degraded_delta_pct\n";
  for (const auto& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.3f,%.3f\n",
                  r.variant.c_str(), r.clean_macro_f, r.degraded_macro_f,
                  r.clean_delta_pct, r.degraded_delta_pct);
    out += buf;
  }
  return out;
}

nlohmann::json AblationTable::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"variant", r.variant},
                   {"clean_macro_f", r.clean_macro_f},
                   {"degraded_macro_f", r.degraded_macro_f},
                   {"clean_delta_pct", r.clean_delta_pct},
                   {"degraded_delta_pct", r.degraded_delta_pct}});
  }
  return arr;
}

AblationTable run_ablation(const RunConfig& cfg, const CorpusData& corpus,
                           const CorpusData& degraded,
                           const augment::AssetPool& pool) {
  if (!cfg.augment_on) {
    throw ConfigError("ablation requires augment_on");
  }
  AblationTable table;
  for (const char* variant : kAblationVariants) {
    RunConfig vcfg = cfg;
    vcfg.augment = ablation_variant(cfg.augment, variant);
    std::string dir_name(variant);
    std::replace(dir_name.begin(), dir_name.end(), '-', 'x');
    vcfg.run_dir = (fs::path(cfg.run_dir) / ("variant_" + dir_name)).string();
    run_training(vcfg, corpus, pool);
    const auto clean_scores = evaluate_run(vcfg.run_dir, corpus);
    const auto deg_scores = evaluate_run(vcfg.run_dir, degraded);
    AblationRow row;
    row.variant = variant;
    row.clean_macro_f = summarize_scores(clean_scores).mean.at("macro_f");
    row.degraded_macro_f = summarize_scores(deg_scores).mean.at("macro_f");
    table.rows.push_back(row);
  }
  const double base_clean = table.rows[0].clean_macro_f;
  const double base_deg = table.rows[0].degraded_macro_f;
  for (auto& row : table.rows) {
    row.clean_delta_pct = eval::improvement_percent(base_clean, row.clean_macro_f);
    row.degraded_delta_pct =
        eval::improvement_percent(base_deg, row.degraded_macro_f);
  }
  return table;
}

}  // namespace serkit::pipeline
