// feat/normalizer.cc

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

#include "feat/normalizer.h"

#include <cmath>

#include "util/error.h"

namespace serkit::feat {

Normalizer::Normalizer()
    : mean_(Eigen::VectorXd::Zero(kNumFeatures)),
      std_(Eigen::VectorXd::Ones(kNumFeatures)) {}

void Normalizer::fit(const std::vector<const FeatureMatrix*>& mats,
                     const std::vector<std::string>& source_ids) {
  long total = 0;
  for (const auto* m : mats) total += m->frames.rows();
  if (total == 0) throw DataError("normalizer fit on zero frames");

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(kNumFeatures);
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(kNumFeatures);
  for (const auto* m : mats) {
    sum += m->frames.colwise().sum().transpose();
    sum_sq += m->frames.array().square().colwise().sum().matrix().transpose();
  }
  mean_ = sum / total;
  for (int j = 0; j < kNumFeatures; ++j) {
    const double var = sum_sq(j) / total - mean_(j) * mean_(j);
    std_(j) = std::max(std::sqrt(std::max(var, 0.0)), 1e-8);
  }
  source_ids_ = source_ids;
  fitted_ = true;
}

FeatureMatrix Normalizer::apply(const FeatureMatrix& m) const {
  if (!fitted_) throw ConfigError("normalizer applied before fit");
  FeatureMatrix out;
  out.frames = (m.frames.rowwise() - mean_.transpose()).array().rowwise() /
               std_.transpose().array();
  return out;
}

void Normalizer::set_state(const Eigen::VectorXd& mean,
                           const Eigen::VectorXd& std_dev,
                           std::vector<std::string> source_ids) {
  if (mean.size() != kNumFeatures || std_dev.size() != kNumFeatures) {
    throw DataError("normalizer state has wrong dimensionality");
  }
  mean_ = mean;
  std_ = std_dev;
  source_ids_ = std::move(source_ids);
  fitted_ = true;
}

}  // namespace serkit::feat
