// audio/dsp.cc

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

#include "audio/dsp.h"

#include <algorithm>
#include <cmath>

#include "audio/fft.h"
#include "util/error.h"

namespace serkit::audio {

namespace {

double clamp_sample(double x, ClampStats* stats) {
  if (x > 1.0) {
    if (stats) ++stats->clamped_samples;
    return 1.0;
  }
  if (x < -1.0) {
    if (stats) ++stats->clamped_samples;
    return -1.0;
  }
  return x;
}

double peak_abs(const std::vector<double>& v) {
  double p = 0.0;
  for (double x : v) p = std::max(p, std::abs(x));
  return p;
}

}  // namespace

double rms(const Waveform& w) {
  if (w.empty()) throw DataError("rms: empty waveform");
  double acc = 0.0;
  for (double x : w.samples) acc += x * x;
  return std::sqrt(acc / static_cast<double>(w.samples.size()));
}

Waveform apply_gain_db(const Waveform& w, double gain_db, ClampStats* stats) {
  if (!std::isfinite(gain_db)) throw DataError("apply_gain_db: non-finite gain");
  if (gain_db == 0.0) return w;
  const double g = std::pow(10.0, gain_db / 20.0);
  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.resize(w.samples.size());
  for (size_t i = 0; i < w.samples.size(); ++i) {
    out.samples[i] = clamp_sample(w.samples[i] * g, stats);
  }
  return out;
}

Waveform mix_at_nsr(const Waveform& signal, const Waveform& noise, double nsr,
                    ClampStats* stats) {
  if (signal.empty()) throw DataError("mix_at_nsr: empty signal");
  if (!(nsr >= 0.0)) throw DataError("mix_at_nsr: nsr must be >= 0");
  if (nsr == 0.0) return signal;
  if (noise.empty()) throw DataError("mix_at_nsr: empty noise");
  if (noise.sample_rate_hz != signal.sample_rate_hz) {
    throw DataError("mix_at_nsr: sample-rate mismatch");
  }

  const size_t n = signal.samples.size();
  // Loop or truncate the noise to the signal length; the seam sits at the
  // noise length when tiling.
  std::vector<double> cropped(n);
  for (size_t i = 0; i < n; ++i) cropped[i] = noise.samples[i % noise.samples.size()];

  double sig_sq = 0.0, noi_sq = 0.0;
  for (double x : signal.samples) sig_sq += x * x;
  for (double x : cropped) noi_sq += x * x;
  const double sig_rms = std::sqrt(sig_sq / static_cast<double>(n));
  const double noi_rms = std::sqrt(noi_sq / static_cast<double>(n));
  if (sig_rms <= 0.0) throw DataError("mix_at_nsr: silent signal");
  if (noi_rms <= 0.0) throw DataError("mix_at_nsr: silent noise with nsr > 0");

  const double alpha = nsr * sig_rms / noi_rms;
  Waveform out;
  out.sample_rate_hz = signal.sample_rate_hz;
  out.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    out.samples[i] = clamp_sample(signal.samples[i] + alpha * cropped[i], stats);
  }
  return out;
}

Waveform convolve_ir(const Waveform& w, const ImpulseResponse& ir) {
  if (ir.taps.empty()) throw DataError("convolve_ir: empty impulse response");
  if (ir.sample_rate_hz != w.sample_rate_hz) {
    throw DataError("convolve_ir: sample-rate mismatch");
  }
  double energy = 0.0;
  for (double t : ir.taps) energy += t * t;
  if (energy <= 0.0) throw DataError("convolve_ir: zero-energy impulse response");
  if (w.empty()) return w;

  const size_t n = w.samples.size();
  const size_t m = ir.taps.size();
  const size_t full = n + m - 1;
  const size_t fft_size = next_pow2(full);

  std::vector<std::complex<double>> a(fft_size, {0.0, 0.0});
  std::vector<std::complex<double>> b(fft_size, {0.0, 0.0});
  for (size_t i = 0; i < n; ++i) a[i] = {w.samples[i], 0.0};
  for (size_t i = 0; i < m; ++i) b[i] = {ir.taps[i], 0.0};
  fft(a, false);
  fft(b, false);
  for (size_t i = 0; i < fft_size; ++i) a[i] *= b[i];
  fft(a, true);

  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.resize(n);
  for (size_t i = 0; i < n; ++i) out.samples[i] = a[i].real();

  // Keep the loudness scale of the input: match output peak to input peak.
  const double in_peak = peak_abs(w.samples);
  const double out_peak = peak_abs(out.samples);
  if (out_peak > 0.0 && in_peak > 0.0) {
    const double scale = in_peak / out_peak;
    for (double& x : out.samples) x *= scale;
  }
  return out;
}

Waveform resample(const Waveform& w, int target_rate_hz) {
  if (target_rate_hz <= 0) throw DataError("resample: bad target rate");
  if (w.sample_rate_hz == target_rate_hz || w.empty()) {
    Waveform out = w;
    out.sample_rate_hz = target_rate_hz;
    return out;
  }

  const double ratio = static_cast<double>(w.sample_rate_hz) / target_rate_hz;
  const size_t out_len = std::max<size_t>(
      1, static_cast<size_t>(std::floor(static_cast<double>(w.samples.size()) / ratio)));
  // Low-pass at the smaller Nyquist when downsampling.
  const double cutoff = std::min(1.0, 1.0 / ratio);
  constexpr int kHalfTaps = 24;

  Waveform out;
  out.sample_rate_hz = target_rate_hz;
  out.samples.resize(out_len);
  const auto& in = w.samples;
  const auto in_len = static_cast<long>(in.size());
  for (size_t i = 0; i < out_len; ++i) {
    const double center = static_cast<double>(i) * ratio;
    const long k0 = static_cast<long>(std::floor(center)) - kHalfTaps + 1;
    const long k1 = static_cast<long>(std::floor(center)) + kHalfTaps;
    double acc = 0.0;
    for (long k = std::max(0L, k0); k <= std::min(in_len - 1, k1); ++k) {
      const double t = (static_cast<double>(k) - center) * cutoff;
      double sinc = (std::abs(t) < 1e-12) ? 1.0 : std::sin(M_PI * t) / (M_PI * t);
      // Hann window over the tap span.
      const double u = (static_cast<double>(k) - center) / kHalfTaps;
      const double win = (std::abs(u) <= 1.0) ? 0.5 * (1.0 + std::cos(M_PI * u)) : 0.0;
      acc += in[static_cast<size_t>(k)] * sinc * win * cutoff;
    }
    out.samples[i] = std::clamp(acc, -1.0, 1.0);
  }
  return out;
}

}  // namespace serkit::audio
