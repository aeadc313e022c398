// audio/dsp.h

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

#ifndef SERKIT_AUDIO_DSP_H_
#define SERKIT_AUDIO_DSP_H_

#include "audio/waveform.h"

namespace serkit::audio {

// Root mean square amplitude. Throws DataError on an empty waveform.
double rms(const Waveform& w);

// Multiplies every sample by 10^(gain_db/20) and clamps to [-1, 1].
// Saturated samples are counted into *stats when provided.
Waveform apply_gain_db(const Waveform& w, double gain_db, ClampStats* stats = nullptr);

// Adds noise scaled so that rms(scaled noise) / rms(signal) == nsr before
// clamping. The noise is looped or truncated to the signal length first and
// the scale is computed from the cropped noise. Throws DataError on a silent
// signal, or on silent noise when nsr > 0.
Waveform mix_at_nsr(const Waveform& signal, const Waveform& noise, double nsr,
                    ClampStats* stats = nullptr);

// FFT-based full linear convolution, truncated to the input length and
// rescaled so the output peak equals the input peak. Throws DataError on a
// sample-rate mismatch or an empty/zero-energy impulse response.
Waveform convolve_ir(const Waveform& w, const ImpulseResponse& ir);

// Windowed-sinc resampling to target_rate_hz. Identity when rates match.
Waveform resample(const Waveform& w, int target_rate_hz);

}  // namespace serkit::audio

#endif  // SERKIT_AUDIO_DSP_H_
