// tests/nn_test.cc

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
#include <vector>

#include "nn/checkpoint.h"
#include "nn/loss.h"
#include "nn/model.h"
#include "util/error.h"
#include "util/rng.h"

using namespace serkit;

namespace {

double sigmoid1(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::MatrixXd random_seq(long t, long d, Rng& rng) {
  Eigen::MatrixXd x(t, d);
  for (long i = 0; i < t; ++i) {
    for (long j = 0; j < d; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
  }
  return x;
}

nn::ModelConfig tiny_config(nn::Arch arch, nn::Head head) {
  nn::ModelConfig cfg;
  cfg.arch = arch;
  cfg.head = head;
  cfg.input_dim = 5;
  cfg.hidden = 4;
  cfg.channels = {3, 4, 5};
  cfg.kernel = 3;
  return cfg;
}

// Mean batch loss matching the training convention: per-item loss averaged
// over the batch, cross entropy for the categorical head, L1 for the
// dimensional head.
struct BatchLoss {
  double value = 0.0;
  std::vector<Eigen::VectorXd> douts;
};

BatchLoss batch_loss(nn::Model* model,
                     const std::vector<const Eigen::MatrixXd*>& xs,
                     const std::vector<long>& masks,
                     const std::vector<int>& cat_targets,
                     const std::vector<Eigen::VectorXd>& dim_targets) {
  const auto outs = model->forward_batch(xs, masks, nn::Mode::kTrain);
  BatchLoss out;
  const double inv_b = 1.0 / static_cast<double>(outs.size());
  for (size_t i = 0; i < outs.size(); ++i) {
    nn::LossResult lr;
    if (model->config().head == nn::Head::kCategorical) {
      lr = nn::softmax_cross_entropy(outs[i], cat_targets[i]);
    } else {
      lr = nn::l1_loss(outs[i], dim_targets[i]);
    }
    out.value += lr.loss * inv_b;
    out.douts.push_back(lr.dpred * inv_b);
  }
  return out;
}

// Central finite differences on a sample of entries of every trainable
// tensor. Returns the worst relative error seen.
double check_gradients(const nn::ModelConfig& cfg, uint64_t seed) {
  auto model = nn::make_model(cfg, seed);
  Rng rng(seed * 7919 + 13);
  const Eigen::MatrixXd x0 = random_seq(6, cfg.input_dim, rng);
  const Eigen::MatrixXd x1 = random_seq(4, cfg.input_dim, rng);
  const std::vector<const Eigen::MatrixXd*> xs = {&x0, &x1};
  const std::vector<long> masks = {6, 4};
  const std::vector<int> cats = {static_cast<int>(rng.next_below(4)),
                                 static_cast<int>(rng.next_below(4))};
  std::vector<Eigen::VectorXd> dims;
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXd t(2);
    t << rng.uniform(1.0, 5.0), rng.uniform(1.0, 5.0);
    dims.push_back(t);
  }

  model->zero_grad();
  const BatchLoss base = batch_loss(model.get(), xs, masks, cats, dims);
  model->backward_batch(base.douts);

  const double h = 1e-5;
  double worst = 0.0;
  for (nn::Parameter* p : model->trainable_params()) {
    const long n = p->w.size();
    const int probes = static_cast<int>(std::min<long>(4, n));
    for (int k = 0; k < probes; ++k) {
      const long idx = static_cast<long>(rng.next_below(n));
      const double keep = p->w(idx);
      p->w(idx) = keep + h;
      const double up = batch_loss(model.get(), xs, masks, cats, dims).value;
      p->w(idx) = keep - h;
      const double dn = batch_loss(model.get(), xs, masks, cats, dims).value;
      p->w(idx) = keep;
      const double fd = (up - dn) / (2.0 * h);
      const double an = p->g(idx);
      const double abs_err = std::abs(an - fd);
      if (abs_err <= 1e-8) continue;
      worst = std::max(worst, abs_err / std::max(std::abs(an), std::abs(fd)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("gru cell matches the hand-computed recurrence") {
  // One unit, one input: every gate is a scalar sigmoid or tanh.
  Eigen::MatrixXd w(3, 1), u(3, 1);
  Eigen::VectorXd b(3), x(1), hp(1);
  w << 0.5, -0.3, 0.8;
  u << 0.2, 0.7, -0.4;
  b << 0.1, -0.2, 0.05;
  x << 0.6;
  hp << -0.35;

  const double z = sigmoid1(0.5 * 0.6 + 0.1 + 0.2 * -0.35);
  const double r = sigmoid1(-0.3 * 0.6 - 0.2 + 0.7 * -0.35);
  const double c = std::tanh(0.8 * 0.6 + 0.05 + -0.4 * (r * -0.35));
  const double want = (1.0 - z) * -0.35 + z * c;

  const Eigen::VectorXd got = nn::gru_cell(x, hp, w, u, b);
  REQUIRE(got.size() == 1);
  CHECK(std::abs(got(0) - want) <= 1e-12);
}

TEST_CASE("gru cell from a zero state ignores the reset gate") {
  Rng rng(5);
  const long h = 3, d = 2;
  Eigen::MatrixXd w = random_seq(3 * h, d, rng);
  Eigen::MatrixXd u = random_seq(3 * h, h, rng);
  Eigen::VectorXd b = random_seq(3 * h, 1, rng).col(0);
  Eigen::VectorXd x = random_seq(d, 1, rng).col(0);
  const Eigen::VectorXd hp = Eigen::VectorXd::Zero(h);
  const Eigen::VectorXd got = nn::gru_cell(x, hp, w, u, b);
  for (long i = 0; i < h; ++i) {
    const double z = sigmoid1((w.row(i) * x)(0) + b(i));
    const double c = std::tanh((w.row(2 * h + i) * x)(0) + b(2 * h + i));
    CHECK(std::abs(got(i) - z * c) <= 1e-12);
  }
}

TEST_CASE("gru cell rejects mismatched shapes") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(6, 2);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(6, 2);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(6);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);  // w expects 2 inputs
  Eigen::VectorXd hp = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(nn::gru_cell(x, hp, w, u, b), ConfigError);
}

TEST_CASE("softmax basics") {
  Eigen::VectorXd flat(4);
  flat << 1.0, 1.0, 1.0, 1.0;
  const Eigen::VectorXd p = nn::softmax(flat);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(p(i) - 0.25) <= 1e-15);

  Eigen::VectorXd logits(3);
  logits << 1.0, 2.0, 3.0;
  const Eigen::VectorXd q = nn::softmax(logits);
  const double denom = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(q(i) - std::exp(1.0 + i) / denom) <= 1e-12);
  }
  CHECK(std::abs(q.sum() - 1.0) <= 1e-12);

  // Shift invariance keeps large logits stable.
  Eigen::VectorXd shifted = logits.array() + 1000.0;
  const Eigen::VectorXd qs = nn::softmax(shifted);
  CHECK((qs - q).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("cross entropy value and gradient") {
  Eigen::VectorXd logits(4);
  logits << 0.2, -0.1, 0.5, 0.0;
  const int target = 2;
  const nn::LossResult lr = nn::softmax_cross_entropy(logits, target);
  const Eigen::VectorXd p = nn::softmax(logits);
  CHECK(std::abs(lr.loss + std::log(p(target))) <= 1e-12);
  for (int i = 0; i < 4; ++i) {
    const double want = p(i) - (i == target ? 1.0 : 0.0);
    CHECK(std::abs(lr.dpred(i) - want) <= 1e-12);
  }
  CHECK_THROWS_AS(nn::softmax_cross_entropy(logits, 4), DataError);
  CHECK_THROWS_AS(nn::softmax_cross_entropy(logits, -1), DataError);
}

TEST_CASE("l1 and l2 losses have their closed forms") {
  Eigen::VectorXd p(2), t(2);
  p << 3.0, 1.0;
  t << 1.0, 2.0;
  const nn::LossResult l1 = nn::l1_loss(p, t);
  CHECK(std::abs(l1.loss - 3.0) <= 1e-15);
  CHECK(l1.dpred(0) == 1.0);
  CHECK(l1.dpred(1) == -1.0);
  const nn::LossResult l2 = nn::l2_loss(p, t);
  CHECK(std::abs(l2.loss - 5.0) <= 1e-15);
  CHECK(l2.dpred(0) == 4.0);
  CHECK(l2.dpred(1) == -2.0);
}

TEST_CASE("temporal pools respect the mask") {
  Eigen::MatrixXd seq(4, 2);
  seq << 1.0, -1.0,
         3.0, 5.0,
         2.0, -9.0,
         100.0, 100.0;  // beyond the mask
  const Eigen::VectorXd mean = nn::temporal_mean_pool(seq, 3);
  CHECK(std::abs(mean(0) - 2.0) <= 1e-15);
  CHECK(std::abs(mean(1) - (-5.0 / 3.0)) <= 1e-15);
  std::vector<long> argmax;
  const Eigen::VectorXd mx = nn::temporal_max_pool(seq, 3, &argmax);
  CHECK(mx(0) == 3.0);
  CHECK(mx(1) == 5.0);
  CHECK(argmax == std::vector<long>{1, 1});
  CHECK_THROWS_AS(nn::temporal_mean_pool(seq, 0), ConfigError);
  CHECK_THROWS_AS(nn::temporal_max_pool(seq, 5), ConfigError);
}

TEST_CASE("analytic gradients match finite differences on five seeds") {
  for (nn::Arch arch : {nn::Arch::kRnn, nn::Arch::kCnn}) {
    for (nn::Head head : {nn::Head::kCategorical, nn::Head::kDimensional}) {
      const nn::ModelConfig cfg = tiny_config(arch, head);
      for (uint64_t seed = 1; seed <= 5; ++seed) {
        const double worst = check_gradients(cfg, seed);
        INFO("arch=", static_cast<int>(arch), " head=",
             static_cast<int>(head), " seed=", seed);
        CHECK(worst < 1e-4);
      }
    }
  }
}

TEST_CASE("padding beyond the mask never changes outputs") {
  Rng rng(77);
  for (nn::Arch arch : {nn::Arch::kRnn, nn::Arch::kCnn}) {
    const nn::ModelConfig cfg = tiny_config(arch, nn::Head::kCategorical);
    auto model = nn::make_model(cfg, 11);
    const Eigen::MatrixXd x = random_seq(6, cfg.input_dim, rng);
    Eigen::MatrixXd padded(9, cfg.input_dim);
    padded.topRows(6) = x;
    padded.bottomRows(3).setConstant(1e6);
    const Eigen::VectorXd a = model->predict(x, 6);
    const Eigen::VectorXd b = model->predict(padded, 6);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("categorical predictions are probabilities") {
  Rng rng(78);
  const nn::ModelConfig cfg = tiny_config(nn::Arch::kRnn,
                                          nn::Head::kCategorical);
  auto model = nn::make_model(cfg, 3);
  const Eigen::MatrixXd x = random_seq(7, cfg.input_dim, rng);
  const Eigen::VectorXd p = model->predict(x, 7);
  REQUIRE(p.size() == 4);
  CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
  CHECK(p.minCoeff() >= 0.0);
}

TEST_CASE("recurrent weight blocks start orthogonal") {
  const nn::ModelConfig cfg = tiny_config(nn::Arch::kRnn,
                                          nn::Head::kCategorical);
  auto model = nn::make_model(cfg, 21);
  const long h = cfg.hidden;
  int blocks = 0;
  for (const auto& [name, w] : model->tensor_map()) {
    if (name.size() < 2 || name.substr(name.size() - 2) != "/u") continue;
    REQUIRE(w.rows() == 3 * h);
    for (int gate = 0; gate < 3; ++gate) {
      const Eigen::MatrixXd block = w.middleRows(gate * h, h);
      const Eigen::MatrixXd gram = block.transpose() * block;
      CHECK((gram - Eigen::MatrixXd::Identity(h, h)).cwiseAbs().maxCoeff() <=
            1e-9);
      ++blocks;
    }
  }
  CHECK(blocks == 12);  // 2 layers x 2 directions x 3 gates
}

TEST_CASE("initialization is a pure function of the seed") {
  const nn::ModelConfig cfg = tiny_config(nn::Arch::kCnn,
                                          nn::Head::kDimensional);
  auto a = nn::make_model(cfg, 42);
  auto b = nn::make_model(cfg, 42);
  auto c = nn::make_model(cfg, 43);
  const auto ta = a->tensor_map();
  const auto tb = b->tensor_map();
  const auto tc = c->tensor_map();
  REQUIRE(ta.size() == tb.size());
  double same_diff = 0.0, other_diff = 0.0;
  for (const auto& [name, w] : ta) {
    same_diff = std::max(same_diff, (w - tb.at(name)).cwiseAbs().maxCoeff());
    other_diff = std::max(other_diff, (w - tc.at(name)).cwiseAbs().maxCoeff());
  }
  CHECK(same_diff == 0.0);
  CHECK(other_diff > 1e-3);
}

TEST_CASE("batch norm statistics move in training and freeze in inference") {
  Rng rng(91);
  const nn::ModelConfig cfg = tiny_config(nn::Arch::kCnn,
                                          nn::Head::kCategorical);
  auto model = nn::make_model(cfg, 8);
  const Eigen::MatrixXd x = random_seq(8, cfg.input_dim, rng);
  const std::vector<const Eigen::MatrixXd*> xs = {&x};
  const std::vector<long> masks = {8};

  const Eigen::MatrixXd before = model->tensor_map().at("cnn/l0/bn_mean");
  model->forward_batch(xs, masks, nn::Mode::kTrain);
  const Eigen::MatrixXd after = model->tensor_map().at("cnn/l0/bn_mean");
  CHECK((after - before).cwiseAbs().maxCoeff() > 1e-12);

  model->forward_batch(xs, masks, nn::Mode::kInfer);
  const Eigen::MatrixXd frozen = model->tensor_map().at("cnn/l0/bn_mean");
  CHECK((frozen - after).cwiseAbs().maxCoeff() == 0.0);

  // Inference is repeatable once statistics are frozen.
  const Eigen::VectorXd p1 = model->predict(x, 8);
  const Eigen::VectorXd p2 = model->predict(x, 8);
  CHECK((p1 - p2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("checkpoints round-trip tensors and metadata bit exactly") {
  const nn::ModelConfig cfg = tiny_config(nn::Arch::kRnn,
                                          nn::Head::kDimensional);
  auto model = nn::make_model(cfg, 17);
  nn::Checkpoint ckpt;
  ckpt.meta = {{"model_config", nlohmann::json::parse(cfg.to_json())},
               {"epoch", 12},
               {"note", "round trip"}};
  ckpt.tensors = model->tensor_map();

  const std::string path = "/tmp/serkit_test_ckpt.sckp";
  ckpt.save(path);
  const nn::Checkpoint loaded = nn::Checkpoint::load(path);
  CHECK(loaded.meta == ckpt.meta);
  REQUIRE(loaded.tensors.size() == ckpt.tensors.size());
  for (const auto& [name, w] : ckpt.tensors) {
    REQUIRE(loaded.tensors.count(name) == 1);
    const Eigen::MatrixXd& r = loaded.tensors.at(name);
    REQUIRE(r.rows() == w.rows());
    REQUIRE(r.cols() == w.cols());
    CHECK((r - w).cwiseAbs().maxCoeff() == 0.0);
  }

  // A fresh model loaded from the file predicts identically.
  auto other = nn::make_model(cfg, 999);
  other->load_tensors(loaded.tensors);
  Rng rng(55);
  const Eigen::MatrixXd x = random_seq(5, cfg.input_dim, rng);
  const Eigen::VectorXd a = model->predict(x, 5);
  const Eigen::VectorXd b = other->predict(x, 5);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("model config json survives a round trip and validates") {
  nn::ModelConfig cfg = tiny_config(nn::Arch::kCnn, nn::Head::kDimensional);
  const nn::ModelConfig r = nn::ModelConfig::from_json(cfg.to_json());
  CHECK(r.arch == cfg.arch);
  CHECK(r.head == cfg.head);
  CHECK(r.input_dim == cfg.input_dim);
  CHECK(r.hidden == cfg.hidden);
  CHECK(r.channels == cfg.channels);
  CHECK(r.kernel == cfg.kernel);

  nn::ModelConfig rnn = tiny_config(nn::Arch::kRnn, nn::Head::kCategorical);
  rnn.hidden = 0;
  CHECK_THROWS_AS(rnn.validate(), ConfigError);
  cfg = tiny_config(nn::Arch::kCnn, nn::Head::kCategorical);
  cfg.kernel = 4;  // same padding needs an odd kernel
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tiny_config(nn::Arch::kCnn, nn::Head::kCategorical);
  cfg.channels.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
