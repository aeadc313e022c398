// audio/fft.h

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

#ifndef SERKIT_AUDIO_FFT_H_
#define SERKIT_AUDIO_FFT_H_

#include <complex>
#include <cstddef>
#include <vector>

namespace serkit::audio {

// In-place iterative radix-2 FFT. data.size() must be a power of two.
void fft(std::vector<std::complex<double>>& data, bool inverse);

// Smallest power of two >= n.
size_t next_pow2(size_t n);

// Magnitude spectrum of a real frame, zero-padded to fft_size (power of two).
// Returns fft_size/2 + 1 non-negative bins.
std::vector<double> real_magnitude_spectrum(const std::vector<double>& frame,
                                            size_t fft_size);

}  // namespace serkit::audio

#endif  // SERKIT_AUDIO_FFT_H_
