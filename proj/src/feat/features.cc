// feat/features.cc

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

#include "feat/features.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "audio/fft.h"
#include "util/error.h"

namespace serkit::feat {

namespace {

constexpr int kWindow = 400;
constexpr int kHop = 160;
constexpr int kFftSize = 512;
constexpr int kNumBins = kFftSize / 2 + 1;
constexpr int kNumMel = 26;
constexpr double kPreEmph = 0.97;
constexpr double kBinHz = 16000.0 / kFftSize;

constexpr int kPitchWindow = 640;
constexpr double kPitchFloorHz = 55.0;
constexpr double kPitchCeilHz = 600.0;
constexpr double kVoicingThreshold = 0.45;

constexpr double kTinyPower = 1e-20;
constexpr double kLogFloor = 1e-10;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

// One triangular mel filter as sparse (bin, weight) pairs.
struct MelFilter {
  int first_bin = 0;
  std::vector<double> weights;
};

const std::vector<MelFilter>& mel_filterbank() {
  static const std::vector<MelFilter> bank = [] {
    std::vector<MelFilter> filters(kNumMel);
    const double mel_lo = hz_to_mel(0.0);
    const double mel_hi = hz_to_mel(8000.0);
    std::vector<double> edge_bins(kNumMel + 2);
    for (int i = 0; i < kNumMel + 2; ++i) {
      const double mel = mel_lo + (mel_hi - mel_lo) * i / (kNumMel + 1);
      const double hz = 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
      edge_bins[i] = hz / kBinHz;
    }
    for (int m = 0; m < kNumMel; ++m) {
      const double lo = edge_bins[m];
      const double mid = edge_bins[m + 1];
      const double hi = edge_bins[m + 2];
      MelFilter f;
      f.first_bin = std::max(0, static_cast<int>(std::ceil(lo)));
      for (int k = f.first_bin; k < kNumBins; ++k) {
        if (k >= hi) break;
        double w = 0.0;
        if (k <= mid) {
          w = (k - lo) / (mid - lo);
        } else {
          w = (hi - k) / (hi - mid);
        }
        if (w < 0.0) w = 0.0;
        f.weights.push_back(w);
      }
      filters[m] = std::move(f);
    }
    return filters;
  }();
  return bank;
}

const Eigen::MatrixXd& dct_matrix() {
  static const Eigen::MatrixXd dct = [] {
    Eigen::MatrixXd m(kNumMfcc, kNumMel);
    const double scale = std::sqrt(2.0 / kNumMel);
    for (int i = 0; i < kNumMfcc; ++i) {
      for (int j = 0; j < kNumMel; ++j) {
        m(i, j) = scale * std::cos(M_PI * (i + 1) * (j + 0.5) / kNumMel);
      }
    }
    return m;
  }();
  return dct;
}

const std::vector<double>& hamming_window() {
  static const std::vector<double> win = [] {
    std::vector<double> w(kWindow);
    for (int i = 0; i < kWindow; ++i) {
      w[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (kWindow - 1));
    }
    return w;
  }();
  return win;
}

// Power spectrum of one Hamming-windowed frame, zero padded to kFftSize.
void frame_power_spectrum(const double* x, std::vector<double>* power) {
  static thread_local std::vector<std::complex<double>> buf;
  buf.assign(kFftSize, {0.0, 0.0});
  const auto& win = hamming_window();
  for (int i = 0; i < kWindow; ++i) buf[i] = x[i] * win[i];
  audio::fft(buf, false);
  power->resize(kNumBins);
  for (int k = 0; k < kNumBins; ++k) (*power)[k] = std::norm(buf[k]);
}

void mel_energies(const std::vector<double>& power, std::vector<double>* mel) {
  const auto& bank = mel_filterbank();
  mel->resize(kNumMel);
  for (int m = 0; m < kNumMel; ++m) {
    const auto& f = bank[m];
    double e = 0.0;
    for (size_t j = 0; j < f.weights.size(); ++j) {
      e += power[f.first_bin + j] * f.weights[j];
    }
    (*mel)[m] = e;
  }
}

int bin_lo(double hz) { return static_cast<int>(std::ceil(hz / kBinHz)); }
int bin_hi(double hz) {
  return std::min(kNumBins - 1, static_cast<int>(std::floor(hz / kBinHz)));
}

double band_power(const std::vector<double>& p, double lo_hz, double hi_hz) {
  double s = 0.0;
  for (int k = bin_lo(lo_hz); k <= bin_hi(hi_hz); ++k) s += p[k];
  return s;
}

double band_peak_db(const std::vector<double>& p, double lo_hz, double hi_hz) {
  double peak = 0.0;
  for (int k = bin_lo(lo_hz); k <= bin_hi(hi_hz); ++k) {
    peak = std::max(peak, p[k]);
  }
  return 10.0 * std::log10(peak + kTinyPower);
}

void band_moments(const std::vector<double>& p, double lo_hz, double hi_hz,
                  double* centroid, double* bandwidth) {
  double e = 0.0;
  double fe = 0.0;
  for (int k = bin_lo(lo_hz); k <= bin_hi(hi_hz); ++k) {
    e += p[k];
    fe += p[k] * k * kBinHz;
  }
  if (e < 1e-12) {
    *centroid = 0.5 * (lo_hz + hi_hz);
    if (bandwidth != nullptr) *bandwidth = 0.0;
    return;
  }
  const double c = fe / e;
  *centroid = c;
  if (bandwidth == nullptr) return;
  double var = 0.0;
  for (int k = bin_lo(lo_hz); k <= bin_hi(hi_hz); ++k) {
    const double d = k * kBinHz - c;
    var += p[k] * d * d;
  }
  *bandwidth = std::sqrt(var / e);
}

// Slope of the dB spectrum against frequency in kHz over [lo_hz, hi_hz].
double band_slope(const std::vector<double>& p, double lo_hz, double hi_hz) {
  const int klo = bin_lo(lo_hz);
  const int khi = bin_hi(hi_hz);
  const int n = khi - klo + 1;
  if (n < 2) return 0.0;
  double fsum = 0.0;
  double dsum = 0.0;
  for (int k = klo; k <= khi; ++k) {
    fsum += k * kBinHz / 1000.0;
    dsum += 10.0 * std::log10(p[k] + kTinyPower);
  }
  const double fmean = fsum / n;
  const double dmean = dsum / n;
  double num = 0.0;
  double den = 0.0;
  for (int k = klo; k <= khi; ++k) {
    const double df = k * kBinHz / 1000.0 - fmean;
    num += df * (10.0 * std::log10(p[k] + kTinyPower) - dmean);
    den += df * df;
  }
  return num / den;
}

double harmonic_db(const std::vector<double>& p, double hz) {
  const int k = static_cast<int>(std::lround(hz / kBinHz));
  if (k < 0 || k >= kNumBins) return 10.0 * std::log10(kTinyPower);
  return 10.0 * std::log10(p[k] + kTinyPower);
}

// Normalized autocorrelation r(tau) for tau in [lag_lo, lag_hi] over x[0, n).
// Both halves of each product are energy normalized so r stays in [-1, 1].
void normalized_autocorr(const double* x, int n, int lag_lo, int lag_hi,
                         std::vector<double>* r) {
  r->assign(lag_hi + 1, 0.0);
  std::vector<double> sq_prefix(n + 1, 0.0);
  for (int i = 0; i < n; ++i) sq_prefix[i + 1] = sq_prefix[i] + x[i] * x[i];
  for (int tau = lag_lo; tau <= lag_hi; ++tau) {
    const int m = n - tau;
    if (m < 8) break;
    double dot = 0.0;
    for (int i = 0; i < m; ++i) dot += x[i] * x[i + tau];
    const double e0 = sq_prefix[m];
    const double e1 = sq_prefix[n] - sq_prefix[tau];
    (*r)[tau] = dot / std::sqrt(e0 * e1 + kTinyPower);
  }
}

// First local maximum within 10% of the global one, scanned from short lags.
// Prefers the fundamental over octave-down subharmonics of equal strength.
int pick_peak_lag(const std::vector<double>& r, int lag_lo, int lag_hi) {
  int best = lag_lo;
  for (int tau = lag_lo; tau <= lag_hi; ++tau) {
    if (r[tau] > r[best]) best = tau;
  }
  const double gate = 0.9 * r[best];
  for (int tau = lag_lo + 1; tau < lag_hi; ++tau) {
    if (r[tau] >= gate && r[tau] >= r[tau - 1] && r[tau] >= r[tau + 1]) {
      return tau;
    }
  }
  return best;
}

struct PitchResult {
  double f0_hz = 0.0;
  double strength = 0.0;
  bool voiced = false;
};

// Coarse search on a decimate-by-2 copy, then a narrow refinement at the
// native rate with parabolic interpolation around the winning lag.
PitchResult analyze_pitch(const double* x, int n) {
  PitchResult out;
  const int lag_lo = static_cast<int>(std::floor(16000.0 / kPitchCeilHz));
  int lag_hi = static_cast<int>(std::ceil(16000.0 / kPitchFloorHz));
  lag_hi = std::min(lag_hi, 3 * n / 4);
  if (lag_hi <= lag_lo + 2) return out;

  const int n2 = n / 2;
  std::vector<double> dec(n2);
  for (int i = 0; i < n2; ++i) dec[i] = 0.5 * (x[2 * i] + x[2 * i + 1]);
  const int clag_lo = std::max(2, lag_lo / 2);
  const int clag_hi = std::min(lag_hi / 2 + 1, 3 * n2 / 4);
  if (clag_hi <= clag_lo + 2) return out;

  std::vector<double> rc;
  normalized_autocorr(dec.data(), n2, clag_lo, clag_hi, &rc);
  const int coarse = pick_peak_lag(rc, clag_lo, clag_hi);

  const int flo = std::max(lag_lo, 2 * coarse - 4);
  const int fhi = std::min(lag_hi, 2 * coarse + 4);
  std::vector<double> rf;
  normalized_autocorr(x, n, flo, fhi, &rf);
  int best = flo;
  for (int tau = flo; tau <= fhi; ++tau) {
    if (rf[tau] > rf[best]) best = tau;
  }

  double lag = best;
  if (best > flo && best < fhi) {
    const double a = rf[best - 1];
    const double b = rf[best];
    const double c = rf[best + 1];
    const double den = a - 2.0 * b + c;
    if (std::abs(den) > 1e-12) {
      double shift = 0.5 * (a - c) / den;
      shift = std::clamp(shift, -0.5, 0.5);
      lag += shift;
    }
  }

  out.strength = std::clamp(rf[best], 0.0, 1.0);
  out.voiced = out.strength >= kVoicingThreshold;
  out.f0_hz = out.voiced ? 16000.0 / lag : 0.0;
  return out;
}

}  // namespace

const std::array<std::string, kNumFeatures>& feature_names() {
  static const std::array<std::string, kNumFeatures> names = {
      "mfcc01",          "mfcc02",
      "mfcc03",          "mfcc04",
      "mfcc05",          "mfcc06",
      "mfcc07",          "mfcc08",
      "mfcc09",          "mfcc10",
      "mfcc11",          "mfcc12",
      "mfcc13",          "f0_hz",
      "voicing_prob",    "jitter_local",
      "shimmer_local",   "loudness_log",
      "spectral_flux",   "hnr_db",
      "band1_centroid_hz", "band1_bandwidth_hz",
      "band2_centroid_hz", "band2_bandwidth_hz",
      "band3_centroid_hz", "spectral_slope_low",
      "spectral_slope_mid", "alpha_ratio_db",
      "hammarberg_db",   "h1_h2_db",
      "h1_a3_db",        "zcr"};
  return names;
}

long frame_count(size_t num_samples, int sample_rate_hz) {
  if (sample_rate_hz != audio::kCanonicalRateHz) {
    throw ConfigError("feature extraction requires 16 kHz input, got " +
                      std::to_string(sample_rate_hz));
  }
  if (num_samples < static_cast<size_t>(kWindow)) return 0;
  return static_cast<long>((num_samples - kWindow) / kHop) + 1;
}

FeatureMatrix extract_raw(const audio::Waveform& w) {
  const long T = frame_count(w.size(), w.sample_rate_hz);
  if (T <= 0) {
    throw DataError("waveform shorter than one analysis window (" +
                    std::to_string(w.size()) + " samples)");
  }
  const size_t n = w.size();
  const double* x = w.samples.data();

  // Pre-emphasis runs over the whole signal before framing so overlapping
  // frames agree on shared samples.
  std::vector<double> pe(n);
  pe[0] = x[0] * (1.0 - kPreEmph);
  for (size_t i = 1; i < n; ++i) pe[i] = x[i] - kPreEmph * x[i - 1];

  FeatureMatrix out;
  out.frames.setZero(T, kNumFeatures);

  std::vector<double> power_plain;
  std::vector<double> power_pe;
  std::vector<double> mel_plain;
  std::vector<double> mel_pe;
  std::vector<double> prev_q;
  std::vector<double> periods(T, 0.0);
  std::vector<double> peaks(T, 0.0);
  std::vector<bool> voiced(T, false);

  for (long t = 0; t < T; ++t) {
    const size_t s = static_cast<size_t>(t) * kHop;
    frame_power_spectrum(x + s, &power_plain);
    frame_power_spectrum(pe.data() + s, &power_pe);

    mel_energies(power_pe, &mel_pe);
    Eigen::VectorXd log_mel(kNumMel);
    for (int m = 0; m < kNumMel; ++m) {
      log_mel(m) = std::log(std::max(mel_pe[m], kLogFloor));
    }
    out.frames.row(t).head(kNumMfcc) = (dct_matrix() * log_mel).transpose();

    mel_energies(power_plain, &mel_plain);
    const double mel_total =
        std::accumulate(mel_plain.begin(), mel_plain.end(), 0.0);
    out.frames(t, kLoudness) = std::log(mel_total + kLogFloor);

    if (mel_total > kTinyPower) {
      std::vector<double> q(kNumMel);
      for (int m = 0; m < kNumMel; ++m) q[m] = mel_plain[m] / mel_total;
      if (!prev_q.empty()) {
        double flux = 0.0;
        for (int m = 0; m < kNumMel; ++m) flux += std::abs(q[m] - prev_q[m]);
        out.frames(t, kSpectralFlux) = flux;
      }
      prev_q = std::move(q);
    } else {
      prev_q.clear();
    }

    double bw = 0.0;
    double c = 0.0;
    band_moments(power_plain, 300.0, 1400.0, &c, &bw);
    out.frames(t, kBand1Centroid) = c;
    out.frames(t, kBand1Bandwidth) = bw;
    band_moments(power_plain, 1400.0, 3200.0, &c, &bw);
    out.frames(t, kBand2Centroid) = c;
    out.frames(t, kBand2Bandwidth) = bw;
    band_moments(power_plain, 3200.0, 5500.0, &c, nullptr);
    out.frames(t, kBand3Centroid) = c;

    out.frames(t, kSlopeLow) = band_slope(power_plain, 0.0, 500.0);
    out.frames(t, kSlopeMid) = band_slope(power_plain, 500.0, 1500.0);
    out.frames(t, kAlphaRatio) =
        10.0 * std::log10((band_power(power_plain, 50.0, 1000.0) + kTinyPower) /
                          (band_power(power_plain, 1000.0, 5000.0) +
                           kTinyPower));
    out.frames(t, kHammarberg) = band_peak_db(power_plain, 0.0, 2000.0) -
                                 band_peak_db(power_plain, 2000.0, 5000.0);

    int crossings = 0;
    double peak = 0.0;
    for (int i = 0; i < kWindow; ++i) {
      peak = std::max(peak, std::abs(x[s + i]));
      if (i > 0 && x[s + i - 1] * x[s + i] < 0.0) ++crossings;
    }
    out.frames(t, kZcr) = static_cast<double>(crossings) / (kWindow - 1);
    peaks[t] = peak;

    // Pitch window: kPitchWindow samples centered on the frame, clamped to
    // the signal. Two pitch periods at the 55 Hz floor do not fit in the
    // 25 ms frame, hence the wider window.
    const long center = static_cast<long>(s) + kWindow / 2;
    const long pn = std::min<long>(kPitchWindow, static_cast<long>(n));
    long ps = center - pn / 2;
    ps = std::clamp<long>(ps, 0, static_cast<long>(n) - pn);
    const PitchResult pitch = analyze_pitch(x + ps, static_cast<int>(pn));
    out.frames(t, kF0) = pitch.f0_hz;
    out.frames(t, kVoicing) = pitch.strength;
    voiced[t] = pitch.voiced;
    periods[t] = pitch.voiced ? 1.0 / pitch.f0_hz : 0.0;

    const double r = std::clamp(pitch.strength, 1e-4, 1.0 - 1e-4);
    out.frames(t, kHnr) = 10.0 * std::log10(r / (1.0 - r));

    if (pitch.voiced) {
      const double h1 = harmonic_db(power_plain, pitch.f0_hz);
      if (2.0 * pitch.f0_hz < 8000.0) {
        out.frames(t, kH1H2) = h1 - harmonic_db(power_plain, 2.0 * pitch.f0_hz);
      }
      out.frames(t, kH1A3) = h1 - band_peak_db(power_plain, 3200.0, 5500.0);
    }
  }

  // Jitter and shimmer as relative frame-to-frame deviation over voiced pairs.
  for (long t = 1; t < T; ++t) {
    if (!voiced[t] || !voiced[t - 1]) continue;
    const double psum = periods[t] + periods[t - 1];
    if (psum > 0.0) {
      out.frames(t, kJitter) =
          2.0 * std::abs(periods[t] - periods[t - 1]) / psum;
    }
    const double asum = peaks[t] + peaks[t - 1];
    if (asum > 1e-12) {
      out.frames(t, kShimmer) = 2.0 * std::abs(peaks[t] - peaks[t - 1]) / asum;
    }
  }

  return out;
}

FeatureMatrix smooth(const FeatureMatrix& m) {
  const long T = m.frames.rows();
  FeatureMatrix out;
  out.frames.resizeLike(m.frames);
  for (long t = 0; t < T; ++t) {
    const long lo = std::max<long>(0, t - 1);
    const long hi = std::min<long>(T - 1, t + 1);
    out.frames.row(t) =
        m.frames.middleRows(lo, hi - lo + 1).colwise().mean();
  }
  return out;
}

FeatureMatrix extract(const audio::Waveform& w) { return smooth(extract_raw(w)); }

}  // namespace serkit::feat
