// audio/waveform.h

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

#ifndef SERKIT_AUDIO_WAVEFORM_H_
#define SERKIT_AUDIO_WAVEFORM_H_

#include <cstddef>
#include <vector>

namespace serkit::audio {

constexpr int kCanonicalRateHz = 16000;

// Mono PCM audio. Samples live in [-1, 1] after any clamping operation.
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = kCanonicalRateHz;

  size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_seconds() const {
    return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
  }
};

// Room (or channel) impulse response. Non-empty with positive energy.
struct ImpulseResponse {
  std::vector<double> taps;
  int sample_rate_hz = kCanonicalRateHz;
};

// Counts saturation events introduced by gain or mixing.
struct ClampStats {
  size_t clamped_samples = 0;
};

}  // namespace serkit::audio

#endif  // SERKIT_AUDIO_WAVEFORM_H_
