// nn/model.h

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

#ifndef SERKIT_NN_MODEL_H_
#define SERKIT_NN_MODEL_H_

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace serkit::nn {

enum class Arch { kRnn, kCnn };
enum class Head { kCategorical, kDimensional };
enum class Mode { kTrain, kInfer };

struct ModelConfig {
  Arch arch = Arch::kRnn;
  Head head = Head::kCategorical;
  int input_dim = 32;
  // Recurrent: two bidirectional GRU layers, this many units per direction.
  int hidden = 128;
  // Convolutional: three conv1d blocks (conv, batch norm, ReLU),
  // stride 1, same padding.
  std::vector<int> channels = {64, 128, 256};
  int kernel = 5;

  int output_dim() const { return head == Head::kCategorical ? 4 : 2; }
  void validate() const;
  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
};

// A named dense tensor with a gradient buffer. Non-trainable entries carry
// layer state (batch-norm running statistics) that checkpoints must keep
// but the optimizer must not touch.
struct Parameter {
  std::string name;
  Eigen::MatrixXd w;
  Eigen::MatrixXd g;
  bool trainable = true;

  void zero_grad() { g.setZero(w.rows(), w.cols()); }
};

// One GRU step. Gate layout in w, u, b: rows [0,H) update, [H,2H) reset,
// [2H,3H) candidate. h = (1-z) (.) h_prev + z (.) tanh-candidate.
Eigen::VectorXd gru_cell(const Eigen::VectorXd& x,
                         const Eigen::VectorXd& h_prev,
                         const Eigen::MatrixXd& w, const Eigen::MatrixXd& u,
                         const Eigen::VectorXd& b);

// Pooling over the first `mask` rows of a frames-by-dims matrix.
Eigen::VectorXd temporal_mean_pool(const Eigen::MatrixXd& seq_out, long mask);
Eigen::VectorXd temporal_max_pool(const Eigen::MatrixXd& seq_out, long mask,
                                  std::vector<long>* argmax = nullptr);

// Fixed-architecture sequence classifier/regressor with exact analytic
// gradients. forward_batch caches activations; backward_batch consumes the
// caches of the immediately preceding forward. Sequences are frames-by-dims
// matrices; masks give the number of real frames.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::vector<Eigen::VectorXd> forward_batch(
      const std::vector<const Eigen::MatrixXd*>& xs,
      const std::vector<long>& masks, Mode mode) = 0;

  // douts align with the outputs of the last forward_batch. Gradients
  // accumulate into Parameter::g (call zero_grad first).
  virtual void backward_batch(const std::vector<Eigen::VectorXd>& douts) = 0;

  // Head output for one sequence; categorical heads yield probabilities.
  Eigen::VectorXd predict(const Eigen::MatrixXd& x, long mask);

  const ModelConfig& config() const { return cfg_; }
  std::vector<Parameter*> params();
  std::vector<Parameter*> trainable_params();
  void zero_grad();

  std::map<std::string, Eigen::MatrixXd> tensor_map() const;
  void load_tensors(const std::map<std::string, Eigen::MatrixXd>& tensors);

 protected:
  Parameter* add_param(const std::string& name, long rows, long cols,
                       bool trainable = true);

  ModelConfig cfg_;
  std::vector<std::unique_ptr<Parameter>> params_;
};

// Builds and initializes a model: orthogonal recurrence blocks, uniform
// fan-in input and conv weights, zero biases, identity batch-norm. The seed
// fully determines the initialization.
std::unique_ptr<Model> make_model(const ModelConfig& cfg, uint64_t seed);

}  // namespace serkit::nn

#endif  // SERKIT_NN_MODEL_H_
