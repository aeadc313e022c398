// augment/augment.h

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

#ifndef SERKIT_AUGMENT_AUGMENT_H_
#define SERKIT_AUGMENT_AUGMENT_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "audio/waveform.h"
#include "util/rng.h"

namespace serkit::augment {

// Training-time perturbation settings. Each augmentation is drawn
// independently with apply_prob; parameters are uniform over their range.
struct AugmentationConfig {
  double tempo_lo = 0.85;
  double tempo_hi = 1.20;
  double gain_lo_db = -6.0;
  double gain_hi_db = 3.0;
  double nsr_lo = 0.5;
  double nsr_hi = 0.9;
  std::vector<std::string> ir_pool;
  std::vector<std::string> noise_pool;
  double apply_prob = 0.5;
  // Per-component switches so ablations can exclude one step at a time.
  bool tempo_enabled = true;
  bool gain_enabled = true;
  bool noise_enabled = true;
  bool ir_enabled = true;
  uint64_t rng_seed = 0;
  // New parameters are drawn every epoch when set; otherwise the epoch-0
  // plan is reused for the whole run.
  bool resample_per_epoch = true;
  // Optional additive Gaussian perturbation, off unless asked for.
  bool gaussian_enabled = false;
  double gaussian_sigma_lo = 0.001;
  double gaussian_sigma_hi = 0.01;

  void validate() const;
};

// One sampled recipe for one utterance. Steps run in the fixed order
// tempo, gain, noise, impulse response; absent steps are identity. The
// plan holds everything needed to replay the exact waveform.
struct AugmentationPlan {
  std::optional<double> tempo_factor;
  std::optional<double> gain_db;
  std::optional<std::string> noise_id;
  std::optional<double> nsr;
  std::optional<std::string> ir_id;
  std::optional<double> gaussian_sigma;
  uint64_t gaussian_seed = 0;

  bool empty() const {
    return !tempo_factor && !gain_db && !noise_id && !ir_id && !gaussian_sigma;
  }
  std::string to_json() const;
  static AugmentationPlan from_json(const std::string& line);
};

// In-memory noise and impulse-response pools keyed by id. Directory loaders
// use the file stem as the id and resample to 16 kHz.
class AssetPool {
 public:
  void add_noise(const std::string& id, audio::Waveform w);
  void add_ir(const std::string& id, audio::ImpulseResponse ir);
  void load_noise_dir(const std::string& dir);
  void load_ir_dir(const std::string& dir);

  const audio::Waveform& noise(const std::string& id) const;
  const audio::ImpulseResponse& ir(const std::string& id) const;

  std::vector<std::string> noise_ids() const;
  std::vector<std::string> ir_ids() const;

 private:
  std::map<std::string, audio::Waveform> noises_;
  std::map<std::string, audio::ImpulseResponse> irs_;
};

AugmentationPlan sample_plan(const AugmentationConfig& cfg, Rng& rng);

// WSOLA time-scale modification: duration becomes round(len / factor)
// samples with pitch preserved. factor outside [0.5, 2.0] is rejected;
// factor 1.0 bypasses exactly.
audio::Waveform change_tempo(const audio::Waveform& w, double factor);

// Labels are carried in manifests by id; this function never sees one.
audio::Waveform apply_plan(const audio::Waveform& w,
                           const AugmentationPlan& plan,
                           const AssetPool& pool);

// Software stand-in for replaying a clean recording through a room and a
// noisy robot head: convolve with the room response, then mix the ego-noise
// bed at the requested noise-to-signal ratio. Pure function of its inputs.
audio::Waveform degrade_channel(const audio::Waveform& w,
                                const audio::ImpulseResponse& ir,
                                const audio::Waveform& ego_noise, double nsr);

}  // namespace serkit::augment

#endif  // SERKIT_AUGMENT_AUGMENT_H_
