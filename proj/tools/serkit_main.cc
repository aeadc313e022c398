// tools/serkit_main.cc

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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "audio/wav_io.h"
#include "corpus/degrade.h"
#include "corpus/manifest.h"
#include "corpus/synth.h"
#include "feat/features.h"
#include "feat/fmx_io.h"
#include "nlohmann/json.hpp"
#include "pipeline/pipeline.h"
#include "pipeline/png_writer.h"
#include "util/common.h"
#include "util/error.h"

namespace fs = std::filesystem;
using namespace serkit;

namespace {

constexpr const char* kAssetEnvVar = "SERKIT_ASSETS";

void log_line(const std::string& msg) {
  std::printf("[serkit] %s\n", msg.c_str());
  std::fflush(stdout);
}

// Resolves the asset root: explicit flag/config first, then the
// environment variable.
std::string resolve_assets(const std::string& configured) {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv(kAssetEnvVar)) {
    log_line(std::string("asset root from ") + kAssetEnvVar + ": " + env);
    return env;
  }
  return "";
}

// Loads --config JSON (if given) and applies trailing `--key value`
// override pairs left unparsed by CLI11.
pipeline::RunConfig load_run_config(const std::string& config_path,
                                    const std::vector<std::string>& extras) {
  nlohmann::json j = nlohmann::json::object();
  if (!config_path.empty()) {
    j = nlohmann::json::parse(read_text_file(config_path), nullptr,
                              /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      throw ConfigError("config file is not valid JSON: " + config_path);
    }
  }
  for (size_t i = 0; i < extras.size(); ++i) {
    std::string key = extras[i];
    if (key.rfind("--", 0) != 0) {
      throw ConfigError("expected --key value override, got: " + key);
    }
    key = key.substr(2);
    if (i + 1 >= extras.size()) {
      throw ConfigError("override --" + key + " is missing a value");
    }
    pipeline::apply_override(&j, key, extras[++i]);
  }
  pipeline::RunConfig cfg = pipeline::RunConfig::from_json(j);
  cfg.assets_dir = resolve_assets(cfg.assets_dir);
  return cfg;
}

void write_summary_outputs(const std::string& out_dir,
                           const pipeline::RobustnessTable& table,
                           const std::vector<pipeline::FoldScore>* folds,
                           const pipeline::ScoreSummary* pooled) {
  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / "summary.csv").string(),
                  table.to_csv());
  write_text_file((fs::path(out_dir) / "summary.json").string(),
                  table.to_json().dump(2) + "\n");
  if (folds) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : *folds) {
      nlohmann::json f{{"fold_id", s.fold_id}, {"count", s.count}};
      if (s.categorical) {
        f["uw_acc"] = s.cat.uw_acc;
        f["uar"] = s.cat.uar;
        f["macro_f"] = s.cat.macro_f;
        f["confusion"] = s.cat.confusion;
      } else {
        f["arousal_mae"] = s.dim.arousal_mae;
        f["valence_mae"] = s.dim.valence_mae;
        if (s.dim.arousal_corr) f["arousal_corr"] = *s.dim.arousal_corr;
        if (s.dim.valence_corr) f["valence_corr"] = *s.dim.valence_corr;
      }
      arr.push_back(std::move(f));
    }
    write_text_file((fs::path(out_dir) / "folds.json").string(),
                    arr.dump(2) + "\n");
  }
  if (pooled && pooled->mean.count("macro_f")) {
    pipeline::write_confusion_png(
        pooled->confusion, (fs::path(out_dir) / "confusion.png").string());
  }
  log_line("summary written to " + out_dir);
}

int cmd_synth(const std::string& out_dir, int size, uint64_t seed,
              bool with_assets) {
  corpus::MiniCorpusSpec spec;
  spec.out_dir = out_dir;
  spec.size = size;
  spec.seed = seed;
  const auto records = corpus::synth_minicorpus(spec);
  log_line("wrote " + std::to_string(records.size()) + " utterances to " +
           out_dir);
  if (with_assets) {
    const std::string assets = (fs::path(out_dir) / "assets").string();
    corpus::synth_assets(assets, seed);
    log_line("wrote noise/ir assets to " + assets);
  }
  return kExitOk;
}

int cmd_curate(const std::string& clips_path, const std::string& tags_path,
               const std::string& out_path) {
  const auto clips = corpus::read_clip_index(clips_path);
  corpus::TagFilter filter = corpus::default_tag_filter();
  if (!tags_path.empty()) {
    filter = corpus::parse_tag_config(read_text_file(tags_path));
  }
  const auto kept = corpus::filter_noise(clips, filter);
  corpus::write_clip_index(out_path, kept);
  log_line("kept " + std::to_string(kept.size()) + " of " +
           std::to_string(clips.size()) + " clips");
  return kExitOk;
}

int cmd_degrade(const std::string& corpus_dir, const std::string& assets_dir,
                const std::string& out_dir, double nsr) {
  const std::string assets = resolve_assets(assets_dir);
  if (assets.empty()) {
    throw ConfigError("no asset root: pass --assets or set " +
                      std::string(kAssetEnvVar));
  }
  const auto records =
      corpus::read_manifest((fs::path(corpus_dir) / "manifest.jsonl").string());
  std::vector<corpus::UtteranceRecord> resolved = records;
  for (auto& r : resolved) {
    if (!fs::exists(r.audio_path)) {
      r.audio_path = (fs::path(corpus_dir) / r.audio_path).string();
    }
  }
  const auto ir = audio::read_ir((fs::path(assets) / "test_rir.wav").string(),
                                 audio::kCanonicalRateHz);
  const auto ego = audio::read_wav_at(
      (fs::path(assets) / "ego_noise.wav").string(), audio::kCanonicalRateHz);
  const auto result =
      corpus::build_degraded_testset(resolved, ir, ego, nsr, out_dir);
  log_line("degraded " + std::to_string(result.records.size()) +
           " utterances (" + std::to_string(result.skipped.size()) +
           " skipped) into " + out_dir);
  return result.skipped.empty() ? kExitOk : kExitData;
}

int cmd_features(const std::string& corpus_dir, const std::string& out_dir) {
  const pipeline::CorpusData corpus = pipeline::load_corpus(corpus_dir);
  fs::create_directories(out_dir);
  for (const auto& item : corpus.items) {
    const feat::FeatureMatrix m = feat::extract(item.wave);
    feat::write_feature_file((fs::path(out_dir) / (item.id + ".fmx")).string(),
                             m);
  }
  log_line("extracted features for " + std::to_string(corpus.items.size()) +
           " utterances into " + out_dir);
  return kExitOk;
}

int cmd_train(const pipeline::RunConfig& cfg) {
  if (cfg.corpus_dir.empty()) throw ConfigError("corpus_dir is required");
  if (cfg.run_dir.empty()) throw ConfigError("run_dir is required");
  const pipeline::CorpusData corpus = pipeline::load_corpus(cfg.corpus_dir);
  augment::AssetPool pool;
  if (cfg.augment_on) {
    if (cfg.assets_dir.empty()) {
      throw ConfigError("augmentation needs an asset root (--assets_dir or " +
                        std::string(kAssetEnvVar) + ")");
    }
    pool = pipeline::load_assets(cfg.assets_dir);
  }
  const auto results = pipeline::run_training(cfg, corpus, pool);
  for (const auto& r : results) {
    char line[160];
    std::snprintf(line, sizeof(line), "fold %d: best val %.4f at epoch %d",
                  r.fold_id, r.best_metric, r.best_epoch);
    log_line(line);
  }
  log_line("run directory: " + cfg.run_dir);
  return kExitOk;
}

int cmd_eval(const std::string& base_run, const std::string& aug_run,
             const std::string& clean_dir, const std::string& degraded_dir,
             std::string out_dir) {
  if (base_run.empty() && aug_run.empty()) {
    throw ConfigError("eval needs --base-run and/or --aug-run");
  }
  if (clean_dir.empty()) throw ConfigError("--clean corpus is required");
  if (out_dir.empty()) {
    out_dir = (fs::path(base_run.empty() ? aug_run : base_run) / "eval").string();
  }
  const pipeline::CorpusData clean = pipeline::load_corpus(clean_dir);
  pipeline::CorpusData degraded;
  if (!degraded_dir.empty()) degraded = pipeline::load_corpus(degraded_dir);

  std::map<std::string, double> base_clean, base_deg, aug_clean, aug_deg;
  std::vector<pipeline::FoldScore> detail;
  pipeline::ScoreSummary pooled;
  auto eval_side = [&](const std::string& run, bool on_degraded) {
    const auto scores =
        pipeline::evaluate_run(run, on_degraded ? degraded : clean);
    const auto summary = pipeline::summarize_scores(scores);
    if (!on_degraded) {
      detail = scores;
      pooled = summary;
    }
    return summary.mean;
  };
  if (!base_run.empty()) {
    base_clean = eval_side(base_run, false);
    if (!degraded_dir.empty()) base_deg = eval_side(base_run, true);
  }
  if (!aug_run.empty()) {
    aug_clean = eval_side(aug_run, false);
    if (!degraded_dir.empty()) aug_deg = eval_side(aug_run, true);
  }
  const auto table =
      pipeline::build_robustness_table(base_clean, base_deg, aug_clean, aug_deg);
  write_summary_outputs(out_dir, table, &detail, &pooled);
  std::printf("%s", table.to_csv().c_str());
  return kExitOk;
}

int cmd_ablate(const pipeline::RunConfig& base_cfg) {
  pipeline::RunConfig cfg = base_cfg;
  cfg.augment_on = true;
  if (cfg.corpus_dir.empty()) throw ConfigError("corpus_dir is required");
  if (cfg.degraded_dir.empty()) throw ConfigError("degraded_dir is required");
  if (cfg.run_dir.empty()) throw ConfigError("run_dir is required");
  if (cfg.assets_dir.empty()) {
    throw ConfigError("ablation needs an asset root (--assets_dir or " +
                      std::string(kAssetEnvVar) + ")");
  }
  const pipeline::CorpusData corpus = pipeline::load_corpus(cfg.corpus_dir);
  const pipeline::CorpusData degraded = pipeline::load_corpus(cfg.degraded_dir);
  const augment::AssetPool pool = pipeline::load_assets(cfg.assets_dir);
  const auto table = pipeline::run_ablation(cfg, corpus, degraded, pool);
  fs::create_directories(cfg.run_dir);
  write_text_file((fs::path(cfg.run_dir) / "ablation.csv").string(),
                  table.to_csv());
  write_text_file((fs::path(cfg.run_dir) / "ablation.json").string(),
                  table.to_json().dump(2) + "\n");
  std::printf("%s", table.to_csv().c_str());
  log_line("ablation table written to " + cfg.run_dir);
  return kExitOk;
}

int cmd_report(const std::string& run_dir, const std::string& clean_dir,
               const std::string& degraded_dir, std::string out_dir) {
  if (out_dir.empty()) out_dir = (fs::path(run_dir) / "report").string();
  return cmd_eval(run_dir, "", clean_dir, degraded_dir, out_dir);
}

int dispatch(int argc, char** argv) {
  CLI::App app{"speech emotion robustness toolkit"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "generate the synthetic corpus");
  std::string synth_out = "data/mini";
  int synth_size = 400;
  uint64_t synth_seed = 1;
  bool synth_no_assets = false;
  synth->add_option("--out", synth_out, "corpus output directory");
  synth->add_option("--size", synth_size, "utterance count (multiple of 40)");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_flag("--no-assets", synth_no_assets, "skip noise/ir assets");

  auto* curate = app.add_subcommand("curate", "tag-filter a noise clip index");
  std::string curate_clips, curate_tags, curate_out = "kept.jsonl";
  curate->add_option("--clips", curate_clips, "clip index JSONL")->required();
  curate->add_option("--tags", curate_tags, "tag config (default stock lists)");
  curate->add_option("--out", curate_out, "output clip index");

  auto* degrade = app.add_subcommand("degrade", "build degraded test corpus");
  std::string deg_corpus, deg_assets, deg_out;
  double deg_nsr = 0.7;
  degrade->add_option("--corpus", deg_corpus, "clean corpus dir")->required();
  degrade->add_option("--assets", deg_assets, "asset root");
  degrade->add_option("--out", deg_out, "output dir")->required();
  degrade->add_option("--nsr", deg_nsr, "noise-to-signal ratio");

  auto* features = app.add_subcommand("features", "extract feature files");
  std::string feat_corpus, feat_out;
  features->add_option("--corpus", feat_corpus, "corpus dir")->required();
  features->add_option("--out", feat_out, "output dir")->required();

  auto* train = app.add_subcommand("train", "train selected folds");
  std::string train_config;
  train->add_option("--config", train_config, "run config JSON");
  train->allow_extras();

  auto* eval_cmd = app.add_subcommand("eval", "evaluate trained runs");
  std::string eval_base, eval_aug, eval_clean, eval_degraded, eval_out;
  eval_cmd->add_option("--base-run", eval_base, "run dir trained without augmentation");
  eval_cmd->add_option("--aug-run", eval_aug, "run dir trained with augmentation");
  eval_cmd->add_option("--clean", eval_clean, "clean test corpus dir");
  eval_cmd->add_option("--degraded", eval_degraded, "degraded test corpus dir");
  eval_cmd->add_option("--out", eval_out, "report output dir");

  auto* ablate = app.add_subcommand("ablate", "augmentation ablation study");
  std::string ablate_config;
  ablate->add_option("--config", ablate_config, "run config JSON");
  ablate->allow_extras();

  auto* report = app.add_subcommand("report", "summarize one finished run");
  std::string rep_run, rep_clean, rep_degraded, rep_out;
  report->add_option("--run", rep_run, "run dir")->required();
  report->add_option("--clean", rep_clean, "clean test corpus dir")->required();
  report->add_option("--degraded", rep_degraded, "degraded test corpus dir");
  report->add_option("--out", rep_out, "report output dir");

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    return cmd_synth(synth_out, synth_size, synth_seed, !synth_no_assets);
  }
  if (curate->parsed()) return cmd_curate(curate_clips, curate_tags, curate_out);
  if (degrade->parsed()) return cmd_degrade(deg_corpus, deg_assets, deg_out, deg_nsr);
  if (features->parsed()) return cmd_features(feat_corpus, feat_out);
  if (train->parsed()) {
    return cmd_train(load_run_config(train_config, train->remaining()));
  }
  if (eval_cmd->parsed()) {
    return cmd_eval(eval_base, eval_aug, eval_clean, eval_degraded, eval_out);
  }
  if (ablate->parsed()) {
    return cmd_ablate(load_run_config(ablate_config, ablate->remaining()));
  }
  if (report->parsed()) {
    return cmd_report(rep_run, rep_clean, rep_degraded, rep_out);
  }
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const DivergedError& e) {
    std::fprintf(stderr, "training diverged: %s\n", e.what());
    return kExitDiverged;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInternal;
  }
}
