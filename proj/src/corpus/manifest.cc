// corpus/manifest.cc

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

#include "corpus/manifest.h"

#include <algorithm>
#include <map>
#include <sstream>

#include "nlohmann/json.hpp"
#include "util/common.h"
#include "util/error.h"

namespace serkit::corpus {

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::string& label_name(Label l) {
  static const std::string names[kNumClasses] = {"Angry", "Happy", "Neutral",
                                                 "Sad"};
  return names[static_cast<int>(l)];
}

std::optional<Label> parse_label(const std::string& name) {
  const std::string s = to_lower(name);
  if (s == "angry") return Label::kAngry;
  if (s == "happy") return Label::kHappy;
  if (s == "neutral") return Label::kNeutral;
  if (s == "sad") return Label::kSad;
  return std::nullopt;
}

std::optional<Label> map_labels(const std::string& raw) {
  const std::string s = to_lower(raw);
  if (s == "angry" || s == "ang") return Label::kAngry;
  if (s == "happy" || s == "hap") return Label::kHappy;
  if (s == "excited" || s == "exc") return Label::kHappy;
  if (s == "neutral" || s == "neu") return Label::kNeutral;
  if (s == "sad") return Label::kSad;
  return std::nullopt;
}

std::vector<UtteranceRecord> read_manifest(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<UtteranceRecord> records;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(t);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": bad manifest line: " + e.what());
    }
    UtteranceRecord r;
    r.id = j.at("id").get<std::string>();
    r.audio_path = j.value("audio", "");
    r.session = j.value("session", 0);
    r.speaker = j.value("speaker", "");
    r.raw_label = j.value("raw_label", "");
    if (j.contains("label")) {
      r.label = parse_label(j["label"].get<std::string>());
      if (!r.label) {
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": unknown mapped label " +
                        j["label"].get<std::string>());
      }
    } else if (!r.raw_label.empty()) {
      r.label = map_labels(r.raw_label);
    }
    if (j.contains("arousal")) r.arousal = j["arousal"].get<double>();
    if (j.contains("valence")) r.valence = j["valence"].get<double>();
    records.push_back(std::move(r));
  }
  return records;
}

void write_manifest(const std::string& path,
                    const std::vector<UtteranceRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::json j;
    j["id"] = r.id;
    j["audio"] = r.audio_path;
    j["session"] = r.session;
    j["speaker"] = r.speaker;
    j["raw_label"] = r.raw_label;
    if (r.label) j["label"] = label_name(*r.label);
    if (r.arousal) j["arousal"] = *r.arousal;
    if (r.valence) j["valence"] = *r.valence;
    out += j.dump();
    out += "\n";
  }
  write_text_file(path, out);
}

ValidationReport validate_manifest(const std::vector<UtteranceRecord>& records,
                                   bool expect_reference_counts) {
  ValidationReport rep;
  rep.total = records.size();
  if (records.empty()) {
    rep.diagnostics.push_back("manifest is empty");
    return rep;
  }
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (r.id.empty()) {
      rep.diagnostics.push_back("record with empty id");
      continue;
    }
    if (!ids.insert(r.id).second) {
      rep.diagnostics.push_back(r.id + ": duplicate id");
    }
    if (r.audio_path.empty()) {
      rep.diagnostics.push_back(r.id + ": missing audio path");
    }
    if (r.session <= 0) {
      rep.diagnostics.push_back(r.id + ": missing or non-positive session");
    }
    if (r.speaker.empty()) {
      rep.diagnostics.push_back(r.id + ": missing speaker");
    }
    if (!r.raw_label.empty() && r.label &&
        map_labels(r.raw_label) != r.label) {
      rep.diagnostics.push_back(r.id + ": mapped label disagrees with raw '" +
                                r.raw_label + "'");
    }
    if (r.arousal && (*r.arousal < 1.0 || *r.arousal > 5.0)) {
      rep.diagnostics.push_back(r.id + ": arousal " +
                                std::to_string(*r.arousal) +
                                " outside [1, 5]");
    }
    if (r.valence && (*r.valence < 1.0 || *r.valence > 5.0)) {
      rep.diagnostics.push_back(r.id + ": valence " +
                                std::to_string(*r.valence) +
                                " outside [1, 5]");
    }
    if (r.label) {
      ++rep.mapped;
      ++rep.class_counts[static_cast<int>(*r.label)];
    }
  }
  if (expect_reference_counts) {
    const size_t want[kNumClasses] = {1103, 1636, 1708, 1084};
    for (int c = 0; c < kNumClasses; ++c) {
      if (rep.class_counts[c] != want[c]) {
        rep.diagnostics.push_back(
            label_name(static_cast<Label>(c)) + " count " +
            std::to_string(rep.class_counts[c]) + ", reference census says " +
            std::to_string(want[c]));
      }
    }
    if (rep.mapped != 5531) {
      rep.diagnostics.push_back("mapped total " + std::to_string(rep.mapped) +
                                ", reference census says 5531");
    }
  }
  return rep;
}

void TagFilter::validate() const {
  for (const auto& t : desired) {
    if (unwanted.count(t) > 0) {
      throw ConfigError("tag '" + t + "' is both desired and unwanted");
    }
  }
}

const TagFilter& default_tag_filter() {
  static const TagFilter filter = {
      {"mash",    "break",     "crash",           "accident", "shatter",
       "crack",   "cracking",  "kitchen",         "knock",    "knocking",
       "domestic-sounds",      "collapse",        "alarm",    "warning",
       "horn",    "fire-alarm", "alert",          "gunfire",  "siren",
       "tap",     "beep",      "falling",         "snapping", "household"},
      {"speech",  "voice",     "cry",             "scream",   "shout",
       "pain",    "crying",    "cough",           "nature",
       "field-recording",      "special-effects", "synthesizer",
       "sound-effect"}};
  return filter;
}

TagFilter parse_tag_config(const std::string& text) {
  TagFilter f;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t[0] == '!') {
      f.unwanted.insert(to_lower(trim(t.substr(1))));
    } else {
      f.desired.insert(to_lower(t));
    }
  }
  f.validate();
  return f;
}

std::vector<NoiseClip> read_clip_index(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<NoiseClip> clips;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto j = nlohmann::json::parse(t);
    NoiseClip c;
    c.id = j.at("id").get<std::string>();
    c.audio_path = j.value("audio", "");
    c.source = j.value("source", "local");
    for (const auto& tag : j.value("tags", std::vector<std::string>{})) {
      c.tags.insert(to_lower(tag));
    }
    clips.push_back(std::move(c));
  }
  return clips;
}

void write_clip_index(const std::string& path,
                      const std::vector<NoiseClip>& clips) {
  std::string out;
  for (const auto& c : clips) {
    nlohmann::json j;
    j["id"] = c.id;
    j["audio"] = c.audio_path;
    j["source"] = c.source;
    j["tags"] = c.tags;
    out += j.dump();
    out += "\n";
  }
  write_text_file(path, out);
}

std::vector<NoiseClip> filter_noise(const std::vector<NoiseClip>& clips,
                                    const TagFilter& filter) {
  filter.validate();
  std::vector<NoiseClip> accepted;
  for (const auto& c : clips) {
    bool wanted = false;
    bool banned = false;
    for (const auto& t : c.tags) {
      if (filter.unwanted.count(t) > 0) banned = true;
      if (filter.desired.count(t) > 0) wanted = true;
    }
    if (wanted && !banned) accepted.push_back(c);
  }
  return accepted;
}

}  // namespace serkit::corpus
