// corpus/degrade.h

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

#ifndef SERKIT_CORPUS_DEGRADE_H_
#define SERKIT_CORPUS_DEGRADE_H_

#include <string>
#include <vector>

#include "audio/waveform.h"
#include "corpus/manifest.h"

namespace serkit::corpus {

struct DegradeResult {
  std::vector<UtteranceRecord> records;
  std::vector<std::string> skipped;  // ids, each with its failure reason
};

// Replays every utterance through the fixed degradation channel (room
// response, then the ego-noise bed at the given noise-to-signal ratio) and
// writes a parallel corpus under out_dir. Ids, labels and dimensional
// annotations are copied verbatim; only audio paths change. The ego-noise
// bed is rotated by a per-id content hash so utterances see different noise
// stretches while staying bit-reproducible. Failures land in the skip
// report, never silently.
DegradeResult build_degraded_testset(const std::vector<UtteranceRecord>& clean,
                                     const audio::ImpulseResponse& ir,
                                     const audio::Waveform& ego_noise,
                                     double nsr, const std::string& out_dir);

}  // namespace serkit::corpus

#endif  // SERKIT_CORPUS_DEGRADE_H_
