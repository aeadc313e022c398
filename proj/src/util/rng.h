// util/rng.h

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

#ifndef SERKIT_UTIL_RNG_H_
#define SERKIT_UTIL_RNG_H_

#include <cstdint>
#include <string>
#include <vector>

namespace serkit {

// Small splitmix64-based generator. Deterministic across platforms and
// splittable by string key, so every (seed, epoch, utterance) pair owns an
// independent stream regardless of worker scheduling.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ^ kGolden) {}

  // Derives an independent stream from this seed and a label, e.g.
  // Rng(seed).split("epoch", 3).split("utt", id_hash).
  Rng split(const std::string& label, uint64_t index = 0) const;

  uint64_t next_u64();

  // Uniform in [0, 1).
  double next_double();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Uniform integer in [0, n).
  uint64_t next_below(uint64_t n);

  // Standard normal via Box-Muller.
  double next_gaussian();

  // Bernoulli with probability p.
  bool next_bool(double p);

  // Deterministic Fisher-Yates shuffle of indices [0, n).
  std::vector<size_t> permutation(size_t n);

  uint64_t state() const { return state_; }
  static Rng from_state(uint64_t s);

 private:
  static constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  Rng() : state_(0) {}
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace serkit

#endif  // SERKIT_UTIL_RNG_H_
