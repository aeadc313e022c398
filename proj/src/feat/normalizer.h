// feat/normalizer.h

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

#ifndef SERKIT_FEAT_NORMALIZER_H_
#define SERKIT_FEAT_NORMALIZER_H_

#include <string>
#include <vector>

#include "feat/features.h"

namespace serkit::feat {

// Per-dimension standardization fitted on training-fold frames only. The ids
// of the utterances that contributed are retained so a checkpoint can prove
// where its statistics came from.
class Normalizer {
 public:
  Normalizer();

  // Pools every frame of every matrix; std is floored at 1e-8.
  void fit(const std::vector<const FeatureMatrix*>& mats,
           const std::vector<std::string>& source_ids);

  FeatureMatrix apply(const FeatureMatrix& m) const;

  bool fitted() const { return fitted_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& std_dev() const { return std_; }
  const std::vector<std::string>& source_ids() const { return source_ids_; }

  void set_state(const Eigen::VectorXd& mean, const Eigen::VectorXd& std_dev,
                 std::vector<std::string> source_ids);

 private:
  bool fitted_ = false;
  Eigen::VectorXd mean_;
  Eigen::VectorXd std_;
  std::vector<std::string> source_ids_;
};

}  // namespace serkit::feat

#endif  // SERKIT_FEAT_NORMALIZER_H_
