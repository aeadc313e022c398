// tests/features_test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <filesystem>
#include <vector>

#include "audio/waveform.h"
#include "feat/features.h"
#include "feat/fmx_io.h"
#include "feat/normalizer.h"
#include "util/error.h"
#include "util/rng.h"

using namespace serkit;

namespace {

constexpr int kSr = audio::kCanonicalRateHz;

audio::Waveform tone(double hz, double seconds, double amp = 0.3) {
  audio::Waveform w;
  w.sample_rate_hz = kSr;
  w.samples.resize(static_cast<size_t>(seconds * kSr));
  for (size_t i = 0; i < w.samples.size(); ++i) {
    w.samples[i] = amp * std::sin(2.0 * M_PI * hz * i / kSr);
  }
  return w;
}

audio::Waveform noise_wave(size_t n, uint64_t seed, double amp = 0.3) {
  Rng rng(seed);
  audio::Waveform w;
  w.sample_rate_hz = kSr;
  w.samples.resize(n);
  for (auto& s : w.samples) s = rng.uniform(-amp, amp);
  return w;
}

// Brute-force cepstral oracle built from first principles: whole-signal
// pre-emphasis, Hamming window, direct O(n^2) DFT, triangular mel filters
// with edges uniform on the mel scale, log with a 1e-10 floor, and an
// orthonormal-style DCT-II keeping coefficients 1 through 13.
std::vector<double> oracle_mfcc(const std::vector<double>& x, long frame) {
  const int win = 400;
  const int hop = 160;
  const int nfft = 512;
  const int nbins = nfft / 2 + 1;
  const int nmel = 26;

  std::vector<double> pe(x.size());
  pe[0] = x[0] * (1.0 - 0.97);
  for (size_t i = 1; i < x.size(); ++i) pe[i] = x[i] - 0.97 * x[i - 1];

  std::vector<double> frame_buf(nfft, 0.0);
  const size_t s = static_cast<size_t>(frame) * hop;
  for (int i = 0; i < win; ++i) {
    const double w = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (win - 1));
    frame_buf[i] = pe[s + i] * w;
  }

  std::vector<double> power(nbins);
  for (int k = 0; k < nbins; ++k) {
    std::complex<double> acc = 0.0;
    for (int n = 0; n < nfft; ++n) {
      const double ang = -2.0 * M_PI * k * n / nfft;
      acc += frame_buf[n] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    power[k] = std::norm(acc);
  }

  const auto hz_to_mel = [](double hz) {
    return 2595.0 * std::log10(1.0 + hz / 700.0);
  };
  const auto mel_to_hz = [](double mel) {
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
  };
  const double bin_hz = static_cast<double>(kSr) / nfft;
  std::vector<double> edges(nmel + 2);
  for (int i = 0; i < nmel + 2; ++i) {
    const double mel = hz_to_mel(0.0) +
                       (hz_to_mel(8000.0) - hz_to_mel(0.0)) * i / (nmel + 1);
    edges[i] = mel_to_hz(mel) / bin_hz;
  }

  std::vector<double> logmel(nmel);
  for (int m = 0; m < nmel; ++m) {
    const double lo = edges[m];
    const double mid = edges[m + 1];
    const double hi = edges[m + 2];
    double e = 0.0;
    for (int k = std::max(0, static_cast<int>(std::ceil(lo))); k < nbins;
         ++k) {
      if (k >= hi) break;
      double w = k <= mid ? (k - lo) / (mid - lo) : (hi - k) / (hi - mid);
      if (w < 0.0) w = 0.0;
      e += power[k] * w;
    }
    logmel[m] = std::log(std::max(e, 1e-10));
  }

  std::vector<double> mfcc(13);
  for (int i = 0; i < 13; ++i) {
    double acc = 0.0;
    for (int j = 0; j < nmel; ++j) {
      acc += logmel[j] * std::cos(M_PI * (i + 1) * (j + 0.5) / nmel);
    }
    mfcc[i] = std::sqrt(2.0 / nmel) * acc;
  }
  return mfcc;
}

}  // namespace

TEST_CASE("frame count follows the floor formula exactly") {
  CHECK(feat::frame_count(400, kSr) == 1);
  CHECK(feat::frame_count(559, kSr) == 1);
  CHECK(feat::frame_count(560, kSr) == 2);
  CHECK(feat::frame_count(16000, kSr) == 98);
  CHECK(feat::frame_count(399, kSr) == 0);
  CHECK(feat::frame_count(0, kSr) == 0);
  for (size_t n : {400u, 401u, 1000u, 4321u, 16000u, 48000u}) {
    CHECK(feat::frame_count(n, kSr) ==
          static_cast<long>((n - 400) / 160) + 1);
  }
  CHECK_THROWS_AS(feat::frame_count(16000, 44100), ConfigError);
}

TEST_CASE("mfcc columns match the brute-force oracle") {
  const audio::Waveform mixed = [] {
    audio::Waveform w = tone(310.0, 0.3, 0.25);
    const audio::Waveform extra = noise_wave(w.samples.size(), 5, 0.05);
    for (size_t i = 0; i < w.samples.size(); ++i) {
      w.samples[i] += extra.samples[i];
    }
    return w;
  }();
  const feat::FeatureMatrix raw = feat::extract_raw(mixed);
  REQUIRE(raw.num_frames() == feat::frame_count(mixed.size(), kSr));
  for (long t : {0L, 3L, raw.num_frames() - 1}) {
    const std::vector<double> want = oracle_mfcc(mixed.samples, t);
    for (int c = 0; c < feat::kNumMfcc; ++c) {
      CHECK(std::abs(raw.frames(t, c) - want[c]) <= 1e-4);
    }
  }
}

TEST_CASE("pure tones report their pitch") {
  for (double hz : {110.0, 220.0, 330.0}) {
    const feat::FeatureMatrix m = feat::extract_raw(tone(hz, 0.5));
    long voiced = 0;
    for (long t = 2; t < m.num_frames() - 2; ++t) {
      if (m.frames(t, feat::kVoicing) < 0.5) continue;
      ++voiced;
      CHECK(std::abs(m.frames(t, feat::kF0) - hz) <= 2.0);
    }
    CHECK(voiced > m.num_frames() / 2);
  }
}

TEST_CASE("white noise carries no voicing") {
  const feat::FeatureMatrix m = feat::extract_raw(noise_wave(8000, 11));
  long voiced = 0;
  for (long t = 0; t < m.num_frames(); ++t) {
    if (m.frames(t, feat::kVoicing) >= 0.5) ++voiced;
  }
  CHECK(voiced <= m.num_frames() / 5);
}

TEST_CASE("spectral flux is near zero for a stationary tone") {
  const feat::FeatureMatrix m = feat::extract_raw(tone(440.0, 0.4));
  for (long t = 1; t < m.num_frames(); ++t) {
    CHECK(m.frames(t, feat::kSpectralFlux) <= 0.05);
  }
}

TEST_CASE("spectral flux ignores overall level") {
  // Flux works on level-normalized mel vectors, so scaling the waveform
  // leaves it untouched.
  audio::Waveform loud = tone(250.0, 0.3);
  audio::Waveform quiet = loud;
  for (auto& s : quiet.samples) s *= 0.1;
  const feat::FeatureMatrix a = feat::extract_raw(loud);
  const feat::FeatureMatrix b = feat::extract_raw(quiet);
  for (long t = 1; t < a.num_frames(); ++t) {
    CHECK(std::abs(a.frames(t, feat::kSpectralFlux) -
                   b.frames(t, feat::kSpectralFlux)) <= 1e-9);
  }
}

TEST_CASE("smoothing is the exact width-3 neighbor average") {
  feat::FeatureMatrix m;
  m.frames.setZero(3, feat::kNumFeatures);
  m.frames(1, 0) = 3.0;
  const feat::FeatureMatrix s = feat::smooth(m);
  CHECK(std::abs(s.frames(0, 0) - 1.5) <= 1e-15);
  CHECK(std::abs(s.frames(1, 0) - 1.0) <= 1e-15);
  CHECK(std::abs(s.frames(2, 0) - 1.5) <= 1e-15);

  // Random matrix against an index-by-index oracle.
  Rng rng(17);
  feat::FeatureMatrix r;
  r.frames.resize(7, feat::kNumFeatures);
  for (long t = 0; t < 7; ++t) {
    for (int c = 0; c < feat::kNumFeatures; ++c) {
      r.frames(t, c) = rng.uniform(-2.0, 2.0);
    }
  }
  const feat::FeatureMatrix sr = feat::smooth(r);
  for (long t = 0; t < 7; ++t) {
    const long lo = std::max<long>(0, t - 1);
    const long hi = std::min<long>(6, t + 1);
    for (int c = 0; c < feat::kNumFeatures; ++c) {
      double acc = 0.0;
      for (long k = lo; k <= hi; ++k) acc += r.frames(k, c);
      CHECK(std::abs(sr.frames(t, c) - acc / (hi - lo + 1)) <= 1e-12);
    }
  }
}

TEST_CASE("extract equals smoothed extract_raw") {
  const audio::Waveform w = noise_wave(4000, 23);
  const feat::FeatureMatrix a = feat::extract(w);
  const feat::FeatureMatrix b = feat::smooth(feat::extract_raw(w));
  CHECK((a.frames - b.frames).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("too-short input throws a typed error") {
  audio::Waveform w;
  w.sample_rate_hz = kSr;
  w.samples.assign(399, 0.1);
  CHECK_THROWS_AS(feat::extract_raw(w), DataError);
}

TEST_CASE("feature files round-trip bit exactly") {
  Rng rng(31);
  feat::FeatureMatrix m;
  m.frames.resize(19, feat::kNumFeatures);
  for (long t = 0; t < m.frames.rows(); ++t) {
    for (int c = 0; c < feat::kNumFeatures; ++c) {
      m.frames(t, c) = rng.uniform(-10.0, 10.0);
    }
  }
  const std::string path = "/tmp/serkit_test_features.fmx";
  feat::write_feature_file(path, m);
  const feat::FeatureMatrix r = feat::read_feature_file(path);
  REQUIRE(r.frames.rows() == m.frames.rows());
  REQUIRE(r.frames.cols() == m.frames.cols());
  // Values are stored as float32, so the read-back equals the float cast.
  for (long t = 0; t < m.frames.rows(); ++t) {
    for (int c = 0; c < feat::kNumFeatures; ++c) {
      CHECK(r.frames(t, c) ==
            static_cast<double>(static_cast<float>(m.frames(t, c))));
    }
  }
  // A second write of the read-back is a fixed point.
  feat::write_feature_file(path, r);
  const feat::FeatureMatrix r2 = feat::read_feature_file(path);
  CHECK((r2.frames - r.frames).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("the cache computes once and replays identically") {
  const std::string dir = "/tmp/serkit_test_cache";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  feat::FeatureCache cache(dir);
  const audio::Waveform w = noise_wave(3000, 41);
  const feat::FeatureMatrix a = cache.get_or_compute(w);
  CHECK(cache.misses() == 1);
  CHECK(cache.hits() == 0);
  const feat::FeatureMatrix b = cache.get_or_compute(w);
  CHECK(cache.hits() == 1);
  // The replay passes through float32 storage, so it equals the cast of
  // the freshly computed matrix, and further replays are bit identical.
  for (long t = 0; t < a.frames.rows(); ++t) {
    for (int c = 0; c < feat::kNumFeatures; ++c) {
      CHECK(b.frames(t, c) ==
            static_cast<double>(static_cast<float>(a.frames(t, c))));
    }
  }
  const feat::FeatureMatrix b2 = cache.get_or_compute(w);
  CHECK((b2.frames - b.frames).cwiseAbs().maxCoeff() == 0.0);
  // A different waveform maps to a different key.
  const audio::Waveform v = noise_wave(3000, 42);
  CHECK(cache.key_for(v) != cache.key_for(w));
  std::filesystem::remove_all(dir);
}

TEST_CASE("normalizer centers and scales the pooled frames") {
  Rng rng(53);
  std::vector<feat::FeatureMatrix> mats(3);
  std::vector<const feat::FeatureMatrix*> ptrs;
  std::vector<std::string> ids = {"a", "b", "c"};
  for (auto& m : mats) {
    m.frames.resize(5, feat::kNumFeatures);
    for (long t = 0; t < 5; ++t) {
      for (int c = 0; c < feat::kNumFeatures; ++c) {
        m.frames(t, c) = rng.uniform(-3.0, 3.0);
      }
    }
    ptrs.push_back(&m);
  }
  feat::Normalizer norm;
  norm.fit(ptrs, ids);
  CHECK(norm.fitted());
  CHECK(norm.source_ids() == ids);

  // Oracle: pool all 15 frames, compute column mean and population std.
  Eigen::MatrixXd pooled(15, feat::kNumFeatures);
  for (int i = 0; i < 3; ++i) pooled.middleRows(i * 5, 5) = mats[i].frames;
  const Eigen::VectorXd mean = pooled.colwise().mean();
  Eigen::VectorXd sd(feat::kNumFeatures);
  for (int c = 0; c < feat::kNumFeatures; ++c) {
    sd(c) = std::sqrt((pooled.col(c).array() - mean(c)).square().mean());
  }
  CHECK((norm.mean() - mean).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((norm.std_dev() - sd).cwiseAbs().maxCoeff() <= 1e-12);

  const feat::FeatureMatrix z = norm.apply(mats[0]);
  for (long t = 0; t < 5; ++t) {
    for (int c = 0; c < feat::kNumFeatures; ++c) {
      const double want = (mats[0].frames(t, c) - mean(c)) / sd(c);
      CHECK(std::abs(z.frames(t, c) - want) <= 1e-12);
    }
  }

  // Applying to the pooled data yields zero mean and unit variance.
  feat::FeatureMatrix pm;
  pm.frames = pooled;
  const feat::FeatureMatrix zp = norm.apply(pm);
  CHECK(zp.frames.colwise().mean().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("constant columns get the std floor instead of dividing by zero") {
  feat::FeatureMatrix m;
  m.frames = Eigen::MatrixXd::Constant(4, feat::kNumFeatures, 2.5);
  feat::Normalizer norm;
  norm.fit({&m}, {"const"});
  for (int c = 0; c < feat::kNumFeatures; ++c) {
    CHECK(norm.std_dev()(c) >= 1e-8);
  }
  const feat::FeatureMatrix z = norm.apply(m);
  CHECK(z.frames.cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("normalizer state survives a set_state round trip") {
  Eigen::VectorXd mean = Eigen::VectorXd::LinSpaced(feat::kNumFeatures, 0, 1);
  Eigen::VectorXd sd = Eigen::VectorXd::Constant(feat::kNumFeatures, 2.0);
  feat::Normalizer norm;
  norm.set_state(mean, sd, {"x"});
  CHECK(norm.fitted());
  CHECK((norm.mean() - mean).cwiseAbs().maxCoeff() == 0.0);
  CHECK((norm.std_dev() - sd).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(norm.source_ids().size() == 1);
  CHECK(norm.source_ids()[0] == "x");
}

TEST_CASE("feature names are unique and the count matches the layout") {
  const auto& names = feat::feature_names();
  REQUIRE(names.size() == static_cast<size_t>(feat::kNumFeatures));
  for (size_t i = 0; i < names.size(); ++i) {
    CHECK(!names[i].empty());
    for (size_t j = i + 1; j < names.size(); ++j) {
      CHECK(names[i] != names[j]);
    }
  }
  CHECK(names[0] == "mfcc01");
  CHECK(names[feat::kNumMfcc - 1] == "mfcc13");
  CHECK(names[feat::kF0] == "f0_hz");
  CHECK(names[feat::kZcr] == "zcr");
}
