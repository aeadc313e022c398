// tests/train_test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <set>
#include <vector>

#include "train/trainer.h"
#include "util/error.h"
#include "util/rng.h"

using namespace serkit;
namespace fs = std::filesystem;

namespace {

constexpr int kSr = audio::kCanonicalRateHz;

// Class-coded tones: each label gets its own pitch and level, which the
// frame descriptors separate cleanly.
train::TrainItem tone_item(corpus::Label label, int variant,
                           const std::string& id) {
  static const double hz[4] = {220.0, 190.0, 150.0, 120.0};
  static const double amp[4] = {0.50, 0.45, 0.25, 0.12};
  static const double aro[4] = {4.5, 4.0, 2.8, 1.8};
  static const double val[4] = {1.5, 4.5, 3.0, 2.0};
  const int c = static_cast<int>(label);
  train::TrainItem item;
  item.id = id;
  item.label = label;
  item.arousal = aro[c];
  item.valence = val[c];
  item.wave.sample_rate_hz = kSr;
  item.wave.samples.resize(2400);  // 0.15 s, 13 frames
  Rng rng(1000 + 16 * c + variant);
  const double f = hz[c] * (1.0 + 0.02 * rng.uniform(-1.0, 1.0));
  for (size_t i = 0; i < item.wave.samples.size(); ++i) {
    item.wave.samples[i] = amp[c] * std::sin(2.0 * M_PI * f * i / kSr) +
                           0.01 * rng.uniform(-1.0, 1.0);
  }
  return item;
}

std::vector<train::TrainItem> tone_set(int per_class, int offset = 0) {
  std::vector<train::TrainItem> items;
  for (int c = 0; c < 4; ++c) {
    for (int v = 0; v < per_class; ++v) {
      const auto l = static_cast<corpus::Label>(c);
      items.push_back(tone_item(
          l, offset + v,
          "t" + std::to_string(c) + "_" + std::to_string(offset + v)));
    }
  }
  return items;
}

nn::Parameter scalar_param(const std::string& name, double w, double g) {
  nn::Parameter p;
  p.name = name;
  p.w = Eigen::MatrixXd::Constant(1, 1, w);
  p.g = Eigen::MatrixXd::Constant(1, 1, g);
  return p;
}

train::FitOptions tiny_fit_options(int max_epochs, uint64_t seed) {
  train::FitOptions opts;
  opts.model.arch = nn::Arch::kRnn;
  opts.model.head = nn::Head::kCategorical;
  opts.model.hidden = 8;
  opts.train.max_epochs = max_epochs;
  opts.train.batch_size = 8;
  opts.train.lr = 3e-3;
  opts.train.seed = seed;
  return opts;
}

}  // namespace

TEST_CASE("gradient clipping is an elementwise clamp") {
  nn::Parameter a = scalar_param("a", 0.0, -2.0);
  nn::Parameter b = scalar_param("b", 0.0, 0.5);
  nn::Parameter c = scalar_param("c", 0.0, 3.0);
  train::clip_gradients({&a, &b, &c}, -1.0, 1.0);
  CHECK(a.g(0, 0) == -1.0);
  CHECK(b.g(0, 0) == 0.5);
  CHECK(c.g(0, 0) == 1.0);

  nn::Parameter bad = scalar_param("bad", 0.0, std::nan(""));
  CHECK_THROWS_AS(train::clip_gradients({&bad}, -1.0, 1.0), DivergedError);
}

TEST_CASE("the first adam step moves by the learning rate") {
  nn::Parameter p = scalar_param("w", 1.0, 0.5);
  train::AdamState state;
  train::TrainConfig cfg;
  train::adam_step(&state, {&p}, cfg, 1e-3);
  CHECK(state.t == 1);
  // Bias correction makes the first update lr * g / (|g| + eps').
  CHECK(std::abs(p.w(0, 0) - (1.0 - 1e-3)) <= 1e-9);

  // The step direction follows the gradient sign.
  nn::Parameter q = scalar_param("q", -0.3, -2.0);
  train::AdamState s2;
  train::adam_step(&s2, {&q}, cfg, 1e-3);
  CHECK(std::abs(q.w(0, 0) - (-0.3 + 1e-3)) <= 1e-9);
}

TEST_CASE("adam minimizes a quadratic") {
  nn::Parameter p = scalar_param("w", 0.0, 0.0);
  train::AdamState state;
  train::TrainConfig cfg;
  for (int i = 0; i < 2000; ++i) {
    p.g(0, 0) = 2.0 * (p.w(0, 0) - 3.0);
    train::adam_step(&state, {&p}, cfg, 0.01);
  }
  CHECK(std::abs(p.w(0, 0) - 3.0) < 0.1);
}

TEST_CASE("adam rejects parameter shape drift") {
  nn::Parameter p = scalar_param("w", 0.0, 1.0);
  train::AdamState state;
  train::TrainConfig cfg;
  train::adam_step(&state, {&p}, cfg, 1e-3);
  p.w = Eigen::MatrixXd::Zero(2, 2);
  p.g = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(train::adam_step(&state, {&p}, cfg, 1e-3),
                  ConfigError);
}

TEST_CASE("epoch zero batches run shortest first") {
  Rng rng(3);
  const std::vector<long> counts = {30, 10, 20};
  const auto batches = train::make_batches(counts, 0, 32, rng);
  REQUIRE(batches.size() == 1);
  CHECK(batches[0] == std::vector<size_t>{1, 2, 0});
}

TEST_CASE("batches chunk evenly with a short tail") {
  Rng rng(4);
  std::vector<long> counts(70, 100);
  const auto batches = train::make_batches(counts, 0, 32, rng);
  REQUIRE(batches.size() == 3);
  CHECK(batches[0].size() == 32);
  CHECK(batches[1].size() == 32);
  CHECK(batches[2].size() == 6);
}

TEST_CASE("later epochs shuffle but still cover every item once") {
  std::vector<long> counts(50);
  for (size_t i = 0; i < counts.size(); ++i) counts[i] = 10 + (i % 7);
  Rng r1(9);
  const auto e1 = train::make_batches(counts, 1, 16, r1);
  std::set<size_t> seen;
  size_t total = 0;
  for (const auto& b : e1) {
    for (size_t idx : b) {
      seen.insert(idx);
      ++total;
    }
  }
  CHECK(total == 50);
  CHECK(seen.size() == 50);
  // Identical rng state gives identical batches.
  Rng r2(9);
  CHECK(train::make_batches(counts, 1, 16, r2) == e1);
}

TEST_CASE("train config validation") {
  train::TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.lr = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = train::TrainConfig();
  cfg.lr_factor = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = train::TrainConfig();
  cfg.plateau_patience = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = train::TrainConfig();
  cfg.clip_lo = 2.0;
  cfg.clip_hi = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = train::TrainConfig();
  cfg.min_lr = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("a pinned validation metric halves the rate after patience") {
  // Four validation items share one waveform under four labels, so every
  // epoch scores the same macro F and the plateau counter runs uninterrupted.
  const auto train_items = tone_set(2);
  std::vector<train::TrainItem> val_items;
  for (int c = 0; c < 4; ++c) {
    auto item = tone_item(corpus::Label::kNeutral, 9, "v" + std::to_string(c));
    item.label = static_cast<corpus::Label>(c);
    val_items.push_back(item);
  }

  train::FitOptions opts = tiny_fit_options(20, 1);
  opts.train.lr = 3e-4;
  opts.train.plateau_patience = 3;
  opts.train.lr_factor = 0.5;
  opts.train.min_lr = 2e-4;  // the first halving crosses the floor
  const train::FitResult res =
      train::fit(opts, train_items, val_items, augment::AssetPool());

  // Epoch 0 improves from scratch; epochs 1 to 3 are stale; the halving at
  // the end of epoch 3 drops below min_lr and stops the run.
  REQUIRE(res.history.size() == 4);
  for (const auto& row : res.history) {
    CHECK(row.lr == 3e-4);
    CHECK(std::abs(row.val_metric - res.history[0].val_metric) <= 1e-12);
  }
  CHECK(res.best_epoch == 0);
}

TEST_CASE("plateau halvings recur every patience epochs while stale") {
  const auto train_items = tone_set(2);
  std::vector<train::TrainItem> val_items;
  for (int c = 0; c < 4; ++c) {
    auto item = tone_item(corpus::Label::kNeutral, 9, "v" + std::to_string(c));
    item.label = static_cast<corpus::Label>(c);
    val_items.push_back(item);
  }
  train::FitOptions opts = tiny_fit_options(10, 1);
  opts.train.lr = 3e-4;
  opts.train.plateau_patience = 3;
  opts.train.lr_factor = 0.5;
  opts.train.min_lr = 1e-9;
  const train::FitResult res =
      train::fit(opts, train_items, val_items, augment::AssetPool());
  REQUIRE(res.history.size() == 10);
  const double want[10] = {3e-4,   3e-4,   3e-4,   3e-4,   1.5e-4,
                           1.5e-4, 1.5e-4, 7.5e-5, 7.5e-5, 7.5e-5};
  for (int e = 0; e < 10; ++e) {
    CHECK(std::abs(res.history[e].lr - want[e]) <= 1e-18);
  }
}

TEST_CASE("training is deterministic in the seed") {
  const auto train_items = tone_set(3);
  const auto val_items = tone_set(1, 8);
  train::FitOptions opts = tiny_fit_options(4, 7);
  const train::FitResult a =
      train::fit(opts, train_items, val_items, augment::AssetPool());
  const train::FitResult b =
      train::fit(opts, train_items, val_items, augment::AssetPool());
  REQUIRE(a.history.size() == b.history.size());
  for (size_t e = 0; e < a.history.size(); ++e) {
    CHECK(a.history[e].train_loss == b.history[e].train_loss);
    CHECK(a.history[e].val_metric == b.history[e].val_metric);
  }
  for (const auto& [name, w] : a.last.tensors) {
    CHECK((w - b.last.tensors.at(name)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("loss descends for at least ninety percent of seeds") {
  const auto train_items = tone_set(4);
  const auto val_items = tone_set(1, 8);
  int descended = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    train::FitOptions opts = tiny_fit_options(5, seed);
    const train::FitResult res =
        train::fit(opts, train_items, val_items, augment::AssetPool());
    if (res.history.back().train_loss < res.history.front().train_loss) {
      ++descended;
    }
  }
  CHECK(descended >= 18);
}

TEST_CASE("a short fit separates the tone classes") {
  const auto train_items = tone_set(8);
  const auto val_items = tone_set(2, 10);
  train::FitOptions opts = tiny_fit_options(15, 3);
  opts.train.lr = 1e-2;
  const train::FitResult res =
      train::fit(opts, train_items, val_items, augment::AssetPool());
  CHECK(res.best_metric > 0.95);
}

TEST_CASE("resuming continues bit-exactly") {
  const auto train_items = tone_set(4);
  const auto val_items = tone_set(1, 8);
  const std::string dir_full = "/tmp/serkit_test_fit_full";
  const std::string dir_half = "/tmp/serkit_test_fit_half";
  const std::string dir_rest = "/tmp/serkit_test_fit_rest";
  fs::remove_all(dir_full);
  fs::remove_all(dir_half);
  fs::remove_all(dir_rest);

  train::FitOptions opts = tiny_fit_options(6, 11);
  opts.run_dir = dir_full;
  const train::FitResult full =
      train::fit(opts, train_items, val_items, augment::AssetPool());

  train::FitOptions half = tiny_fit_options(3, 11);
  half.run_dir = dir_half;
  train::fit(half, train_items, val_items, augment::AssetPool());

  train::FitOptions rest = tiny_fit_options(6, 11);
  rest.run_dir = dir_rest;
  rest.resume_from = dir_half + "/last.ckpt";
  const train::FitResult resumed =
      train::fit(rest, train_items, val_items, augment::AssetPool());

  // The resumed run carries the restored rows, so the histories align
  // one to one over all six epochs.
  REQUIRE(resumed.history.size() == full.history.size());
  for (size_t i = 0; i < resumed.history.size(); ++i) {
    const auto& a = resumed.history[i];
    const auto& b = full.history[i];
    CHECK(a.epoch == b.epoch);
    CHECK(a.train_loss == b.train_loss);
    CHECK(a.val_metric == b.val_metric);
    CHECK(a.lr == b.lr);
  }
  for (const auto& [name, w] : full.last.tensors) {
    CHECK((w - resumed.last.tensors.at(name)).cwiseAbs().maxCoeff() == 0.0);
  }

  // Resuming under a different architecture is refused.
  train::FitOptions wrong = tiny_fit_options(6, 11);
  wrong.model.hidden = 16;
  wrong.resume_from = dir_half + "/last.ckpt";
  CHECK_THROWS_AS(
      train::fit(wrong, train_items, val_items, augment::AssetPool()),
      ConfigError);

  fs::remove_all(dir_full);
  fs::remove_all(dir_half);
  fs::remove_all(dir_rest);
}

TEST_CASE("non-finite features surface as divergence") {
  auto train_items = tone_set(2);
  train_items[0].wave.samples[100] = std::nan("");
  const auto val_items = tone_set(1, 8);
  train::FitOptions opts = tiny_fit_options(2, 5);
  CHECK_THROWS_AS(
      train::fit(opts, train_items, val_items, augment::AssetPool()),
      DivergedError);
}
