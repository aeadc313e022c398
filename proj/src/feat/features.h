// feat/features.h

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

#ifndef SERKIT_FEAT_FEATURES_H_
#define SERKIT_FEAT_FEATURES_H_

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "audio/waveform.h"

namespace serkit::feat {

constexpr int kNumFeatures = 32;
constexpr int kNumMfcc = 13;
constexpr double kFrameStrideS = 0.010;
constexpr double kWindowS = 0.025;

// Column layout of the feature matrix. MFCCs occupy columns [0, 13).
enum FeatureIndex : int {
  kF0 = 13,
  kVoicing = 14,
  kJitter = 15,
  kShimmer = 16,
  kLoudness = 17,
  kSpectralFlux = 18,
  kHnr = 19,
  kBand1Centroid = 20,
  kBand1Bandwidth = 21,
  kBand2Centroid = 22,
  kBand2Bandwidth = 23,
  kBand3Centroid = 24,
  kSlopeLow = 25,
  kSlopeMid = 26,
  kAlphaRatio = 27,
  kHammarberg = 28,
  kH1H2 = 29,
  kH1A3 = 30,
  kZcr = 31,
};

// T x 32 matrix of frame-level descriptors (25 ms window, 10 ms stride).
struct FeatureMatrix {
  Eigen::MatrixXd frames;

  long num_frames() const { return frames.rows(); }
};

const std::array<std::string, kNumFeatures>& feature_names();

// Frame count for n samples at 16 kHz: floor((n - 400) / 160) + 1.
long frame_count(size_t num_samples, int sample_rate_hz);

// Extracts the raw (unsmoothed) descriptor matrix. Requires 16 kHz input at
// least one window long.
FeatureMatrix extract_raw(const audio::Waveform& w);

// extract_raw followed by the width-3 moving-average smoothing.
FeatureMatrix extract(const audio::Waveform& w);

// Centered moving average of width 3 per column; boundary frames average the
// available neighbors.
FeatureMatrix smooth(const FeatureMatrix& m);

// Bumped whenever the extraction chain changes; part of the disk cache key.
constexpr uint32_t kExtractorVersion = 1;

}  // namespace serkit::feat

#endif  // SERKIT_FEAT_FEATURES_H_
