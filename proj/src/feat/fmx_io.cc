// feat/fmx_io.cc

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

#include "feat/fmx_io.h"

#include <cstring>
#include <filesystem>

#include "nlohmann/json.hpp"
#include "util/common.h"
#include "util/error.h"

namespace serkit::feat {

namespace {

constexpr char kMagic[4] = {'S', 'F', 'M', 'X'};
constexpr uint32_t kFormatVersion = 1;

void append_u32(std::string* buf, uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  buf->append(b, 4);
}

uint32_t read_u32(const std::vector<unsigned char>& buf, size_t off) {
  uint32_t v = 0;
  std::memcpy(&v, buf.data() + off, 4);
  return v;
}

}  // namespace

void write_feature_file(const std::string& path, const FeatureMatrix& m) {
  const uint32_t rows = static_cast<uint32_t>(m.frames.rows());
  const uint32_t cols = static_cast<uint32_t>(m.frames.cols());
  std::string buf;
  buf.reserve(16 + static_cast<size_t>(rows) * cols * 4);
  buf.append(kMagic, 4);
  append_u32(&buf, kFormatVersion);
  append_u32(&buf, rows);
  append_u32(&buf, cols);
  for (uint32_t t = 0; t < rows; ++t) {
    for (uint32_t j = 0; j < cols; ++j) {
      const float v = static_cast<float>(m.frames(t, j));
      char b[4];
      std::memcpy(b, &v, 4);
      buf.append(b, 4);
    }
  }
  write_binary_file(path, buf.data(), buf.size());

  nlohmann::json sidecar;
  sidecar["feature_names"] = feature_names();
  sidecar["num_frames"] = rows;
  sidecar["extractor_version"] = kExtractorVersion;
  write_text_file(path + ".json", sidecar.dump(2) + "\n");
}

FeatureMatrix read_feature_file(const std::string& path) {
  const std::vector<unsigned char> buf = read_binary_file(path);
  if (buf.size() < 16 || std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw DataError("not a feature container: " + path);
  }
  const uint32_t version = read_u32(buf, 4);
  if (version != kFormatVersion) {
    throw DataError("unsupported feature container version " +
                    std::to_string(version) + " in " + path);
  }
  const uint32_t rows = read_u32(buf, 8);
  const uint32_t cols = read_u32(buf, 12);
  const size_t need = 16 + static_cast<size_t>(rows) * cols * 4;
  if (cols != kNumFeatures || buf.size() != need) {
    throw DataError("feature container has wrong shape: " + path);
  }

  const std::string sidecar_path = path + ".json";
  if (std::filesystem::exists(sidecar_path)) {
    const auto sidecar = nlohmann::json::parse(read_text_file(sidecar_path));
    const auto names = sidecar.at("feature_names");
    if (names.size() != kNumFeatures) {
      throw DataError("sidecar name list has wrong length: " + sidecar_path);
    }
    for (int j = 0; j < kNumFeatures; ++j) {
      if (names[j].get<std::string>() != feature_names()[j]) {
        throw DataError("sidecar feature names disagree with this build: " +
                        sidecar_path);
      }
    }
  }

  FeatureMatrix m;
  m.frames.resize(rows, cols);
  size_t off = 16;
  for (uint32_t t = 0; t < rows; ++t) {
    for (uint32_t j = 0; j < cols; ++j) {
      float v = 0.0f;
      std::memcpy(&v, buf.data() + off, 4);
      m.frames(t, j) = v;
      off += 4;
    }
  }
  return m;
}

FeatureCache::FeatureCache(std::string dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string FeatureCache::key_for(const audio::Waveform& w) const {
  std::string material;
  material.resize(w.samples.size() * sizeof(double) + 8);
  if (!w.samples.empty()) {
    std::memcpy(material.data(), w.samples.data(),
                w.samples.size() * sizeof(double));
  }
  uint32_t tail[2] = {static_cast<uint32_t>(w.sample_rate_hz),
                      kExtractorVersion};
  std::memcpy(material.data() + w.samples.size() * sizeof(double), tail, 8);
  return hash_hex(hash_bytes(material.data(), material.size()));
}

FeatureMatrix FeatureCache::get_or_compute(const audio::Waveform& w) {
  const std::string path = dir_ + "/" + key_for(w) + ".fmx";
  if (std::filesystem::exists(path)) {
    ++hits_;
    return read_feature_file(path);
  }
  ++misses_;
  FeatureMatrix m = extract(w);
  write_feature_file(path, m);
  return m;
}

}  // namespace serkit::feat
