// nn/model.cc

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

#include "nn/model.h"

#include <cmath>

#include "nlohmann/json.hpp"
#include "util/error.h"
#include "util/rng.h"

namespace serkit::nn {

namespace {

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.1;

Eigen::MatrixXd uniform_fan_in(long rows, long cols, long fan_in, Rng& rng) {
  const double s = std::sqrt(1.0 / static_cast<double>(fan_in));
  Eigen::MatrixXd m(rows, cols);
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) m(i, j) = rng.uniform(-s, s);
  }
  return m;
}

// Orthogonal matrix from the QR of a Gaussian draw, sign-fixed so the
// factorization is unique.
Eigen::MatrixXd orthogonal(long n, Rng& rng) {
  Eigen::MatrixXd g(n, n);
  for (long j = 0; j < n; ++j) {
    for (long i = 0; i < n; ++i) g(i, j) = rng.next_gaussian();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (long j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& a) {
  return 1.0 / (1.0 + (-a).exp());
}

}  // namespace

void ModelConfig::validate() const {
  if (input_dim <= 0) throw ConfigError("model input_dim must be positive");
  if (arch == Arch::kRnn) {
    if (hidden <= 0) throw ConfigError("rnn hidden size must be positive");
  } else {
    if (channels.size() != 3) {
      throw ConfigError("cnn takes exactly three conv layers");
    }
    for (int c : channels) {
      if (c <= 0) throw ConfigError("conv channel counts must be positive");
    }
    if (kernel <= 0 || kernel % 2 == 0) {
      throw ConfigError("conv kernel width must be odd and positive");
    }
  }
}

std::string ModelConfig::to_json() const {
  nlohmann::json j;
  j["arch"] = arch == Arch::kRnn ? "rnn" : "cnn";
  j["head"] = head == Head::kCategorical ? "categorical" : "dimensional";
  j["input_dim"] = input_dim;
  j["hidden"] = hidden;
  j["channels"] = channels;
  j["kernel"] = kernel;
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ModelConfig cfg;
  const std::string arch = j.value("arch", "rnn");
  if (arch == "rnn") {
    cfg.arch = Arch::kRnn;
  } else if (arch == "cnn") {
    cfg.arch = Arch::kCnn;
  } else {
    throw ConfigError("unknown arch '" + arch + "'");
  }
  const std::string head = j.value("head", "categorical");
  if (head == "categorical") {
    cfg.head = Head::kCategorical;
  } else if (head == "dimensional") {
    cfg.head = Head::kDimensional;
  } else {
    throw ConfigError("unknown head '" + head + "'");
  }
  cfg.input_dim = j.value("input_dim", 32);
  cfg.hidden = j.value("hidden", 128);
  cfg.channels = j.value("channels", std::vector<int>{64, 128, 256});
  cfg.kernel = j.value("kernel", 5);
  cfg.validate();
  return cfg;
}

Eigen::VectorXd gru_cell(const Eigen::VectorXd& x,
                         const Eigen::VectorXd& h_prev,
                         const Eigen::MatrixXd& w, const Eigen::MatrixXd& u,
                         const Eigen::VectorXd& b) {
  const long h = h_prev.size();
  if (w.rows() != 3 * h || u.rows() != 3 * h || b.size() != 3 * h ||
      w.cols() != x.size() || u.cols() != h) {
    throw ConfigError("gru_cell parameter shapes do not match inputs");
  }
  const Eigen::VectorXd wx = w * x + b;
  const Eigen::ArrayXd z =
      sigmoid((wx.segment(0, h) + u.middleRows(0, h) * h_prev).array());
  const Eigen::ArrayXd r =
      sigmoid((wx.segment(h, h) + u.middleRows(h, h) * h_prev).array());
  const Eigen::VectorXd rh = (r * h_prev.array()).matrix();
  const Eigen::ArrayXd c =
      ((wx.segment(2 * h, h) + u.middleRows(2 * h, h) * rh).array()).tanh();
  return ((1.0 - z) * h_prev.array() + z * c).matrix();
}

Eigen::VectorXd temporal_mean_pool(const Eigen::MatrixXd& seq_out, long mask) {
  if (mask < 1 || mask > seq_out.rows()) {
    throw ConfigError("mean pool mask outside [1, frames]");
  }
  return seq_out.topRows(mask).colwise().mean().transpose();
}

Eigen::VectorXd temporal_max_pool(const Eigen::MatrixXd& seq_out, long mask,
                                  std::vector<long>* argmax) {
  if (mask < 1 || mask > seq_out.rows()) {
    throw ConfigError("max pool mask outside [1, frames]");
  }
  const long d = seq_out.cols();
  Eigen::VectorXd out(d);
  if (argmax != nullptr) argmax->assign(d, 0);
  for (long j = 0; j < d; ++j) {
    long best = 0;
    for (long t = 1; t < mask; ++t) {
      if (seq_out(t, j) > seq_out(best, j)) best = t;
    }
    out(j) = seq_out(best, j);
    if (argmax != nullptr) (*argmax)[j] = best;
  }
  return out;
}

Parameter* Model::add_param(const std::string& name, long rows, long cols,
                            bool trainable) {
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->w.setZero(rows, cols);
  p->g.setZero(rows, cols);
  p->trainable = trainable;
  params_.push_back(std::move(p));
  return params_.back().get();
}

std::vector<Parameter*> Model::params() {
  std::vector<Parameter*> out;
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<Parameter*> Model::trainable_params() {
  std::vector<Parameter*> out;
  for (auto& p : params_) {
    if (p->trainable) out.push_back(p.get());
  }
  return out;
}

void Model::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

std::map<std::string, Eigen::MatrixXd> Model::tensor_map() const {
  std::map<std::string, Eigen::MatrixXd> out;
  for (const auto& p : params_) out[p->name] = p->w;
  return out;
}

void Model::load_tensors(const std::map<std::string, Eigen::MatrixXd>& tensors) {
  for (auto& p : params_) {
    const auto it = tensors.find(p->name);
    if (it == tensors.end()) {
      throw DataError("checkpoint is missing tensor " + p->name);
    }
    if (it->second.rows() != p->w.rows() || it->second.cols() != p->w.cols()) {
      throw DataError("checkpoint tensor " + p->name + " has wrong shape");
    }
    p->w = it->second;
  }
}

Eigen::VectorXd Model::predict(const Eigen::MatrixXd& x, long mask) {
  const std::vector<const Eigen::MatrixXd*> xs = {&x};
  const std::vector<long> masks = {mask};
  Eigen::VectorXd out = forward_batch(xs, masks, Mode::kInfer)[0];
  if (cfg_.head == Head::kCategorical) {
    const Eigen::ArrayXd shifted = out.array() - out.maxCoeff();
    const Eigen::ArrayXd e = shifted.exp();
    out = (e / e.sum()).matrix();
  }
  return out;
}

// ---------------------------------------------------------------- RNN ----

namespace {

// Unidirectional GRU over a dims-by-frames block in processing order.
struct GruDirParams {
  Parameter* w;  // 3H x D
  Parameter* u;  // 3H x H
  Parameter* b;  // 3H x 1
};

struct GruDirCache {
  Eigen::MatrixXd x;   // D x T, processing order
  Eigen::MatrixXd h;   // H x (T+1), col 0 initial state
  Eigen::MatrixXd z, r, c, rh;  // H x T
};

Eigen::MatrixXd gru_dir_forward(const GruDirParams& p, Eigen::MatrixXd x,
                                GruDirCache* cache) {
  const long hidden = p.u->w.cols();
  const long T = x.cols();
  const Eigen::MatrixXd wx = p.w->w * x;  // 3H x T

  cache->x = std::move(x);
  cache->h.setZero(hidden, T + 1);
  cache->z.resize(hidden, T);
  cache->r.resize(hidden, T);
  cache->c.resize(hidden, T);
  cache->rh.resize(hidden, T);

  const auto& u = p.u->w;
  const auto& b = p.b->w;
  for (long t = 0; t < T; ++t) {
    const Eigen::VectorXd h_prev = cache->h.col(t);
    const Eigen::VectorXd uzr = u.topRows(2 * hidden) * h_prev;
    const Eigen::ArrayXd z = sigmoid(
        (wx.col(t).segment(0, hidden) + uzr.segment(0, hidden) +
         b.col(0).segment(0, hidden)).array());
    const Eigen::ArrayXd r = sigmoid(
        (wx.col(t).segment(hidden, hidden) + uzr.segment(hidden, hidden) +
         b.col(0).segment(hidden, hidden)).array());
    const Eigen::VectorXd rh = (r * h_prev.array()).matrix();
    const Eigen::ArrayXd c =
        ((wx.col(t).segment(2 * hidden, hidden) +
          u.bottomRows(hidden) * rh + b.col(0).segment(2 * hidden, hidden))
             .array())
            .tanh();
    cache->z.col(t) = z.matrix();
    cache->r.col(t) = r.matrix();
    cache->c.col(t) = c.matrix();
    cache->rh.col(t) = rh;
    cache->h.col(t + 1) =
        ((1.0 - z) * h_prev.array() + z * c).matrix();
  }
  return cache->h.rightCols(T);
}

// dout is H x T in processing order; returns dx and accumulates into grads.
Eigen::MatrixXd gru_dir_backward(const GruDirParams& p,
                                 const GruDirCache& cache,
                                 const Eigen::MatrixXd& dout) {
  const long hidden = p.u->w.cols();
  const long T = cache.z.cols();
  const auto& u = p.u->w;

  Eigen::MatrixXd da(3 * hidden, T);  // gate pre-activation grads
  Eigen::VectorXd carry = Eigen::VectorXd::Zero(hidden);
  for (long t = T - 1; t >= 0; --t) {
    const Eigen::ArrayXd dh = dout.col(t).array() + carry.array();
    const Eigen::ArrayXd z = cache.z.col(t).array();
    const Eigen::ArrayXd r = cache.r.col(t).array();
    const Eigen::ArrayXd c = cache.c.col(t).array();
    const Eigen::ArrayXd h_prev = cache.h.col(t).array();

    const Eigen::ArrayXd daz = dh * (c - h_prev) * z * (1.0 - z);
    const Eigen::ArrayXd dah = dh * z * (1.0 - c * c);
    Eigen::ArrayXd dh_prev = dh * (1.0 - z);

    const Eigen::ArrayXd drh =
        (u.bottomRows(hidden).transpose() * dah.matrix()).array();
    const Eigen::ArrayXd dar = drh * h_prev * r * (1.0 - r);
    dh_prev += drh * r;

    da.col(t).segment(0, hidden) = daz.matrix();
    da.col(t).segment(hidden, hidden) = dar.matrix();
    da.col(t).segment(2 * hidden, hidden) = dah.matrix();

    dh_prev += (u.topRows(2 * hidden).transpose() *
                da.col(t).segment(0, 2 * hidden))
                   .array();
    carry = dh_prev.matrix();
  }

  p.w->g += da * cache.x.transpose();
  p.b->g += da.rowwise().sum();
  p.u->g.topRows(2 * hidden) +=
      da.topRows(2 * hidden) * cache.h.leftCols(T).transpose();
  p.u->g.bottomRows(hidden) += da.bottomRows(hidden) * cache.rh.transpose();
  return p.w->w.transpose() * da;
}

class RnnModel : public Model {
 public:
  RnnModel(const ModelConfig& cfg, uint64_t seed) {
    cfg_ = cfg;
    Rng root(seed);
    const long h = cfg.hidden;
    for (int l = 0; l < 2; ++l) {
      const long d = l == 0 ? cfg.input_dim : 2 * h;
      for (const char* dir : {"fwd", "bwd"}) {
        const std::string base =
            "rnn/l" + std::to_string(l) + "/" + dir + "/";
        GruDirParams p;
        p.w = add_param(base + "w", 3 * h, d);
        p.u = add_param(base + "u", 3 * h, h);
        p.b = add_param(base + "b", 3 * h, 1);
        Rng wr = root.split("init/" + base + "w");
        p.w->w = uniform_fan_in(3 * h, d, d, wr);
        Rng ur = root.split("init/" + base + "u");
        for (int gate = 0; gate < 3; ++gate) {
          p.u->w.middleRows(gate * h, h) = orthogonal(h, ur);
        }
        dirs_.push_back(p);
      }
    }
    head_w_ = add_param("head/w", cfg.output_dim(), 2 * h);
    head_b_ = add_param("head/b", cfg.output_dim(), 1);
    Rng hr = root.split("init/head/w");
    head_w_->w = uniform_fan_in(cfg.output_dim(), 2 * h, 2 * h, hr);
  }

  std::vector<Eigen::VectorXd> forward_batch(
      const std::vector<const Eigen::MatrixXd*>& xs,
      const std::vector<long>& masks, Mode) override {
    const size_t n = xs.size();
    caches_.assign(n, SeqCache{});
    std::vector<Eigen::VectorXd> outs(n);
    for (size_t i = 0; i < n; ++i) {
      SeqCache& sc = caches_[i];
      sc.mask = masks[i];
      if (sc.mask < 1 || sc.mask > xs[i]->rows()) {
        throw ConfigError("sequence mask outside [1, frames]");
      }
      if (xs[i]->cols() != cfg_.input_dim) {
        throw ConfigError("sequence feature dim mismatch");
      }
      const long T = sc.mask;
      const long h = cfg_.hidden;
      Eigen::MatrixXd cur = xs[i]->topRows(T).transpose();  // D x T
      for (int l = 0; l < 2; ++l) {
        Eigen::MatrixXd rev = cur.rowwise().reverse();
        const Eigen::MatrixXd of =
            gru_dir_forward(dirs_[2 * l], std::move(cur), &sc.dir_caches[2 * l]);
        const Eigen::MatrixXd ob = gru_dir_forward(
            dirs_[2 * l + 1], std::move(rev), &sc.dir_caches[2 * l + 1]);
        Eigen::MatrixXd next(2 * h, T);
        next.topRows(h) = of;
        next.bottomRows(h) = ob.rowwise().reverse();
        cur = std::move(next);
      }
      sc.pooled = temporal_mean_pool(cur.transpose(), T);
      sc.top = std::move(cur);
      outs[i] = head_w_->w * sc.pooled + head_b_->w.col(0);
    }
    return outs;
  }

  void backward_batch(const std::vector<Eigen::VectorXd>& douts) override {
    const long h = cfg_.hidden;
    for (size_t i = 0; i < douts.size(); ++i) {
      SeqCache& sc = caches_[i];
      const long T = sc.mask;
      head_w_->g += douts[i] * sc.pooled.transpose();
      head_b_->g.col(0) += douts[i];
      const Eigen::VectorXd dpooled = head_w_->w.transpose() * douts[i];

      // Mean pool spreads the gradient uniformly over frames.
      Eigen::MatrixXd dcur =
          (dpooled / static_cast<double>(T)).replicate(1, T);
      for (int l = 1; l >= 0; --l) {
        const Eigen::MatrixXd df = gru_dir_backward(
            dirs_[2 * l], sc.dir_caches[2 * l], dcur.topRows(h));
        const Eigen::MatrixXd db =
            gru_dir_backward(dirs_[2 * l + 1], sc.dir_caches[2 * l + 1],
                             dcur.bottomRows(h).rowwise().reverse());
        dcur = df + db.rowwise().reverse();
      }
      // dcur is the input gradient; sequences own their features, nothing
      // upstream consumes it.
    }
  }

 private:
  struct SeqCache {
    long mask = 0;
    std::array<GruDirCache, 4> dir_caches;
    Eigen::MatrixXd top;
    Eigen::VectorXd pooled;
  };

  std::vector<GruDirParams> dirs_;  // l0 fwd, l0 bwd, l1 fwd, l1 bwd
  Parameter* head_w_;
  Parameter* head_b_;
  std::vector<SeqCache> caches_;
};

// ---------------------------------------------------------------- CNN ----

class CnnModel : public Model {
 public:
  CnnModel(const ModelConfig& cfg, uint64_t seed) {
    cfg_ = cfg;
    Rng root(seed);
    long cin = cfg.input_dim;
    for (int l = 0; l < 3; ++l) {
      const long cout = cfg.channels[l];
      const std::string base = "cnn/l" + std::to_string(l) + "/";
      Layer lay;
      lay.w = add_param(base + "w", cout, cin * cfg.kernel);
      lay.b = add_param(base + "b", cout, 1);
      lay.gamma = add_param(base + "bn_gamma", cout, 1);
      lay.beta = add_param(base + "bn_beta", cout, 1);
      lay.run_mean = add_param(base + "bn_mean", cout, 1, false);
      lay.run_var = add_param(base + "bn_var", cout, 1, false);
      lay.gamma->w.setOnes();
      lay.run_var->w.setOnes();
      Rng wr = root.split("init/" + base + "w");
      lay.w->w = uniform_fan_in(cout, cin * cfg.kernel, cin * cfg.kernel, wr);
      layers_.push_back(lay);
      cin = cout;
    }
    head_w_ = add_param("head/w", cfg.output_dim(), cin);
    head_b_ = add_param("head/b", cfg.output_dim(), 1);
    Rng hr = root.split("init/head/w");
    head_w_->w = uniform_fan_in(cfg.output_dim(), cin, cin, hr);
  }

  std::vector<Eigen::VectorXd> forward_batch(
      const std::vector<const Eigen::MatrixXd*>& xs,
      const std::vector<long>& masks, Mode mode) override {
    const size_t n = xs.size();
    const int pad = cfg_.kernel / 2;
    seq_.assign(n, SeqCache{});
    layer_caches_.assign(3, LayerCache{});
    std::vector<Eigen::MatrixXd> cur(n);
    for (size_t i = 0; i < n; ++i) {
      seq_[i].mask = masks[i];
      if (masks[i] < 1 || masks[i] > xs[i]->rows()) {
        throw ConfigError("sequence mask outside [1, frames]");
      }
      if (xs[i]->cols() != cfg_.input_dim) {
        throw ConfigError("sequence feature dim mismatch");
      }
      cur[i] = xs[i]->topRows(masks[i]).transpose();  // C x T
    }

    for (int l = 0; l < 3; ++l) {
      Layer& lay = layers_[l];
      LayerCache& lc = layer_caches_[l];
      const long cout = lay.w->w.rows();
      const long cin = cur[0].rows();
      lc.cols.resize(n);
      lc.xhat.resize(n);
      lc.relu_in_pos.resize(n);

      // Convolution per sequence, then batch-norm statistics jointly over
      // every real frame in the batch.
      long total = 0;
      std::vector<Eigen::MatrixXd> pre(n);
      for (size_t i = 0; i < n; ++i) {
        const long T = cur[i].cols();
        Eigen::MatrixXd col(cin * cfg_.kernel, T);
        col.setZero();
        for (int k = 0; k < cfg_.kernel; ++k) {
          const long off = k - pad;
          const long t_lo = std::max<long>(0, -off);
          const long t_hi = std::min<long>(T, T - off);
          if (t_hi > t_lo) {
            col.middleRows(k * cin, cin).middleCols(t_lo, t_hi - t_lo) =
                cur[i].middleCols(t_lo + off, t_hi - t_lo);
          }
        }
        pre[i] = lay.w->w * col;
        pre[i].colwise() += lay.b->w.col(0);
        lc.cols[i] = std::move(col);
        total += T;
      }

      Eigen::VectorXd mean(cout), var(cout);
      if (mode == Mode::kTrain) {
        mean.setZero();
        for (size_t i = 0; i < n; ++i) mean += pre[i].rowwise().sum();
        mean /= static_cast<double>(total);
        var.setZero();
        for (size_t i = 0; i < n; ++i) {
          var += (pre[i].colwise() - mean).array().square().rowwise().sum().matrix();
        }
        var /= static_cast<double>(total);
        lay.run_mean->w.col(0) =
            (1.0 - kBnMomentum) * lay.run_mean->w.col(0) + kBnMomentum * mean;
        lay.run_var->w.col(0) =
            (1.0 - kBnMomentum) * lay.run_var->w.col(0) + kBnMomentum * var;
      } else {
        mean = lay.run_mean->w.col(0);
        var = lay.run_var->w.col(0);
      }
      lc.invstd = (var.array() + kBnEps).rsqrt().matrix();
      lc.total = total;

      for (size_t i = 0; i < n; ++i) {
        Eigen::MatrixXd xhat =
            ((pre[i].colwise() - mean).array().colwise() *
             lc.invstd.col(0).array())
                .matrix();
        Eigen::MatrixXd y =
            (xhat.array().colwise() * lay.gamma->w.col(0).array())
                .matrix();
        y.colwise() += lay.beta->w.col(0);
        lc.relu_in_pos[i] = (y.array() > 0.0);
        cur[i] = y.cwiseMax(0.0);
        lc.xhat[i] = std::move(xhat);
      }
    }

    std::vector<Eigen::VectorXd> outs(n);
    for (size_t i = 0; i < n; ++i) {
      seq_[i].pooled =
          temporal_max_pool(cur[i].transpose(), cur[i].cols(), &seq_[i].argmax);
      outs[i] = head_w_->w * seq_[i].pooled + head_b_->w.col(0);
    }
    return outs;
  }

  void backward_batch(const std::vector<Eigen::VectorXd>& douts) override {
    const size_t n = douts.size();
    const int pad = cfg_.kernel / 2;
    std::vector<Eigen::MatrixXd> dcur(n);
    for (size_t i = 0; i < n; ++i) {
      head_w_->g += douts[i] * seq_[i].pooled.transpose();
      head_b_->g.col(0) += douts[i];
      const Eigen::VectorXd dpooled = head_w_->w.transpose() * douts[i];
      dcur[i].setZero(layers_[2].w->w.rows(), seq_[i].mask);
      for (long j = 0; j < dpooled.size(); ++j) {
        dcur[i](j, seq_[i].argmax[j]) += dpooled(j);
      }
    }

    for (int l = 2; l >= 0; --l) {
      Layer& lay = layers_[l];
      LayerCache& lc = layer_caches_[l];
      const long cout = lay.w->w.rows();
      const long cin = lay.w->w.cols() / cfg_.kernel;
      const double total = static_cast<double>(lc.total);

      // ReLU gate, then the joint batch-norm backward.
      Eigen::VectorXd sum_dxhat = Eigen::VectorXd::Zero(cout);
      Eigen::VectorXd sum_dxhat_xhat = Eigen::VectorXd::Zero(cout);
      for (size_t i = 0; i < n; ++i) {
        dcur[i] = (lc.relu_in_pos[i]).select(dcur[i], 0.0);
        lay.beta->g.col(0) += dcur[i].rowwise().sum();
        lay.gamma->g.col(0) +=
            (dcur[i].array() * lc.xhat[i].array()).rowwise().sum().matrix();
        dcur[i] =
            (dcur[i].array().colwise() * lay.gamma->w.col(0).array()).matrix();
        sum_dxhat += dcur[i].rowwise().sum();
        sum_dxhat_xhat +=
            (dcur[i].array() * lc.xhat[i].array()).rowwise().sum().matrix();
      }
      for (size_t i = 0; i < n; ++i) {
        dcur[i] = (lc.invstd.col(0).array() / total).matrix().asDiagonal() *
                  (total * dcur[i] -
                   sum_dxhat.replicate(1, dcur[i].cols()) -
                   (lc.xhat[i].array().colwise() * sum_dxhat_xhat.col(0).array())
                       .matrix());
      }

      for (size_t i = 0; i < n; ++i) {
        const long T = dcur[i].cols();
        lay.w->g += dcur[i] * lc.cols[i].transpose();
        lay.b->g.col(0) += dcur[i].rowwise().sum();
        const Eigen::MatrixXd dcol = lay.w->w.transpose() * dcur[i];
        Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(cin, T);
        for (int k = 0; k < cfg_.kernel; ++k) {
          const long off = k - pad;
          const long t_lo = std::max<long>(0, -off);
          const long t_hi = std::min<long>(T, T - off);
          if (t_hi > t_lo) {
            dx.middleCols(t_lo + off, t_hi - t_lo) +=
                dcol.middleRows(k * cin, cin).middleCols(t_lo, t_hi - t_lo);
          }
        }
        dcur[i] = std::move(dx);
      }
    }
  }

 private:
  struct Layer {
    Parameter *w, *b, *gamma, *beta, *run_mean, *run_var;
  };
  struct LayerCache {
    std::vector<Eigen::MatrixXd> cols;
    std::vector<Eigen::MatrixXd> xhat;
    std::vector<Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>> relu_in_pos;
    Eigen::MatrixXd invstd;
    long total = 0;
  };
  struct SeqCache {
    long mask = 0;
    Eigen::VectorXd pooled;
    std::vector<long> argmax;
  };

  std::vector<Layer> layers_;
  Parameter* head_w_;
  Parameter* head_b_;
  std::vector<LayerCache> layer_caches_;
  std::vector<SeqCache> seq_;
};

}  // namespace

std::unique_ptr<Model> make_model(const ModelConfig& cfg, uint64_t seed) {
  cfg.validate();
  if (cfg.arch == Arch::kRnn) return std::make_unique<RnnModel>(cfg, seed);
  return std::make_unique<CnnModel>(cfg, seed);
}

}  // namespace serkit::nn
