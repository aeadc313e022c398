// corpus/degrade.cc

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

#include "corpus/degrade.h"

#include <filesystem>

#include "augment/augment.h"
#include "audio/wav_io.h"
#include "nlohmann/json.hpp"
#include "util/common.h"
#include "util/error.h"

namespace serkit::corpus {

DegradeResult build_degraded_testset(const std::vector<UtteranceRecord>& clean,
                                     const audio::ImpulseResponse& ir,
                                     const audio::Waveform& ego_noise,
                                     double nsr, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path root(out_dir);
  fs::create_directories(root / "wav");

  DegradeResult result;
  for (const auto& rec : clean) {
    try {
      const audio::Waveform w =
          audio::read_wav_at(rec.audio_path, audio::kCanonicalRateHz);

      // Rotate the bed by a stable per-id offset so the whole test set does
      // not share one noise head.
      audio::Waveform bed = ego_noise;
      const size_t off = hash_string(rec.id) % bed.samples.size();
      std::rotate(bed.samples.begin(), bed.samples.begin() + off,
                  bed.samples.end());

      const audio::Waveform degraded =
          augment::degrade_channel(w, ir, bed, nsr);
      UtteranceRecord out = rec;
      // Rewritten relative to the degraded manifest's directory.
      out.audio_path = "wav/" + rec.id + ".wav";
      audio::write_wav((root / "wav" / (rec.id + ".wav")).string(), degraded,
                       audio::WavFormat::kPcm16);
      result.records.push_back(std::move(out));
    } catch (const std::exception& e) {
      result.skipped.push_back(rec.id + ": " + e.what());
    }
  }

  write_manifest((root / "manifest.jsonl").string(), result.records);

  nlohmann::json prov;
  prov["nsr"] = nsr;
  prov["ir_hash"] = hash_hex(hash_bytes(ir.taps.data(),
                                        ir.taps.size() * sizeof(double)));
  prov["ego_noise_hash"] =
      hash_hex(hash_bytes(ego_noise.samples.data(),
                          ego_noise.samples.size() * sizeof(double)));
  prov["source_utterances"] = clean.size();
  prov["degraded_utterances"] = result.records.size();
  prov["skipped"] = result.skipped;
  write_text_file((root / "provenance.json").string(), prov.dump(2) + "\n");

  if (!result.skipped.empty()) {
    nlohmann::json skip;
    skip["skipped"] = result.skipped;
    write_text_file((root / "skip_report.json").string(), skip.dump(2) + "\n");
  }
  return result;
}

}  // namespace serkit::corpus
