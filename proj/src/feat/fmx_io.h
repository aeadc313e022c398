// feat/fmx_io.h

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

#ifndef SERKIT_FEAT_FMX_IO_H_
#define SERKIT_FEAT_FMX_IO_H_

#include <string>
#include <vector>

#include "audio/waveform.h"
#include "feat/features.h"

namespace serkit::feat {

// Binary frame-matrix container: magic "SFMX", u32 version, u32 rows,
// u32 cols, then row-major float32 data. Feature names live in a JSON
// sidecar at <path>.json.
void write_feature_file(const std::string& path, const FeatureMatrix& m);

// Reads the container; checks magic, version and the sidecar name list.
FeatureMatrix read_feature_file(const std::string& path);

// Content-addressed extraction cache. The key hashes the raw samples, the
// sample rate and the extractor version, so a changed waveform or a bumped
// extractor never serves stale rows.
class FeatureCache {
 public:
  explicit FeatureCache(std::string dir);

  FeatureMatrix get_or_compute(const audio::Waveform& w);

  std::string key_for(const audio::Waveform& w) const;

  size_t hits() const { return hits_; }
  size_t misses() const { return misses_; }

 private:
  std::string dir_;
  size_t hits_ = 0;
  size_t misses_ = 0;
};

}  // namespace serkit::feat

#endif  // SERKIT_FEAT_FMX_IO_H_
