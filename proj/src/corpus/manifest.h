// corpus/manifest.h

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

#ifndef SERKIT_CORPUS_MANIFEST_H_
#define SERKIT_CORPUS_MANIFEST_H_

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace serkit::corpus {

enum class Label : int { kAngry = 0, kHappy = 1, kNeutral = 2, kSad = 3 };
constexpr int kNumClasses = 4;

const std::string& label_name(Label l);
std::optional<Label> parse_label(const std::string& name);

// Excited folds into Happy; the four kept classes map to themselves; every
// other label is excluded. Accepts full names and 3-letter corpus codes,
// case-insensitively.
std::optional<Label> map_labels(const std::string& raw);

struct UtteranceRecord {
  std::string id;
  std::string audio_path;
  int session = 0;
  std::string speaker;
  std::string raw_label;
  std::optional<Label> label;
  std::optional<double> arousal;  // 1 (calm) .. 5 (excited)
  std::optional<double> valence;  // 1 (negative) .. 5 (positive)
};

std::vector<UtteranceRecord> read_manifest(const std::string& path);
void write_manifest(const std::string& path,
                    const std::vector<UtteranceRecord>& records);

struct ValidationReport {
  size_t total = 0;
  size_t mapped = 0;
  std::vector<size_t> class_counts = std::vector<size_t>(kNumClasses, 0);
  std::vector<std::string> diagnostics;

  bool ok() const { return diagnostics.empty(); }
};

// Structural checks plus, when expect_reference_counts is set, the class
// census a full-size source corpus must satisfy: 1103 Angry, 1636 Happy,
// 1708 Neutral, 1084 Sad, 5531 overall.
ValidationReport validate_manifest(const std::vector<UtteranceRecord>& records,
                                   bool expect_reference_counts = false);

struct NoiseClip {
  std::string id;
  std::string audio_path;
  std::set<std::string> tags;
  std::string source;
};

struct TagFilter {
  std::set<std::string> desired;
  std::set<std::string> unwanted;

  void validate() const;
};

// The stock curation lists used when no tag config is supplied.
const TagFilter& default_tag_filter();

// A line per tag; '!' prefix marks it unwanted; '#' starts a comment.
TagFilter parse_tag_config(const std::string& text);

std::vector<NoiseClip> read_clip_index(const std::string& path);
void write_clip_index(const std::string& path,
                      const std::vector<NoiseClip>& clips);

// Accept iff the clip shares a desired tag and no unwanted tag; an unwanted
// hit rejects even when desired tags are present.
std::vector<NoiseClip> filter_noise(const std::vector<NoiseClip>& clips,
                                    const TagFilter& filter);

}  // namespace serkit::corpus

#endif  // SERKIT_CORPUS_MANIFEST_H_
