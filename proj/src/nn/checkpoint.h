// nn/checkpoint.h

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

#ifndef SERKIT_NN_CHECKPOINT_H_
#define SERKIT_NN_CHECKPOINT_H_

#include <Eigen/Dense>
#include <map>
#include <string>

#include "nlohmann/json.hpp"

namespace serkit::nn {

// Versioned binary container: magic "SCKP", u32 version, one JSON metadata
// blob, then named float64 tensors. Round-trips are bit-exact, which the
// resume-training contract depends on.
struct Checkpoint {
  nlohmann::json meta;
  std::map<std::string, Eigen::MatrixXd> tensors;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace serkit::nn

#endif  // SERKIT_NN_CHECKPOINT_H_
