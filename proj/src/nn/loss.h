// nn/loss.h

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

#ifndef SERKIT_NN_LOSS_H_
#define SERKIT_NN_LOSS_H_

#include <Eigen/Dense>

namespace serkit::nn {

struct LossResult {
  double loss = 0.0;
  Eigen::VectorXd dpred;  // gradient wrt the head output
};

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

// Cross-entropy on logits; the gradient folds the softmax in.
LossResult softmax_cross_entropy(const Eigen::VectorXd& logits, int target);

// Absolute error summed over the output dimensions, matching the reported
// error metric. Subgradient 0 at exact ties.
LossResult l1_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);

// Squared error alternative for the dimensional head.
LossResult l2_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);

}  // namespace serkit::nn

#endif  // SERKIT_NN_LOSS_H_
