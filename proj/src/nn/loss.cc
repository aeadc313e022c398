// nn/loss.cc

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

#include "nn/loss.h"

#include <cmath>

#include "util/error.h"

namespace serkit::nn {

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const Eigen::ArrayXd shifted = logits.array() - logits.maxCoeff();
  const Eigen::ArrayXd e = shifted.exp();
  return (e / e.sum()).matrix();
}

LossResult softmax_cross_entropy(const Eigen::VectorXd& logits, int target) {
  if (target < 0 || target >= logits.size()) {
    throw DataError("class target " + std::to_string(target) +
                    " outside [0, " + std::to_string(logits.size()) + ")");
  }
  const Eigen::VectorXd p = softmax(logits);
  LossResult out;
  out.loss = -std::log(std::max(p(target), 1e-300));
  out.dpred = p;
  out.dpred(target) -= 1.0;
  return out;
}

LossResult l1_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
  if (pred.size() != target.size()) {
    throw DataError("l1 loss shape mismatch");
  }
  LossResult out;
  out.loss = (pred - target).array().abs().sum();
  out.dpred = (pred - target).array().sign().matrix();
  return out;
}

LossResult l2_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
  if (pred.size() != target.size()) {
    throw DataError("l2 loss shape mismatch");
  }
  LossResult out;
  out.loss = (pred - target).squaredNorm();
  out.dpred = 2.0 * (pred - target);
  return out;
}

}  // namespace serkit::nn
