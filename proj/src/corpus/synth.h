// corpus/synth.h

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

#ifndef SERKIT_CORPUS_SYNTH_H_
#define SERKIT_CORPUS_SYNTH_H_

#include <string>
#include <vector>

#include "audio/waveform.h"
#include "corpus/manifest.h"
#include "util/rng.h"

namespace serkit::corpus {

// Prosodic recipe for one class. Emotion is encoded purely in prosody
// (pitch level and movement, intensity, pacing) so the frame-level
// front-end carries enough signal to separate the classes.
struct ClassPrototype {
  double f0_base_hz;
  double f0_var;      // vibrato / sweep depth as a fraction of f0
  double intensity;   // target waveform peak
  double dur_lo_s;
  double dur_hi_s;
  int syl_lo;
  int syl_hi;
  double arousal;
  double valence;
};

const ClassPrototype& class_prototype(Label l);

struct MiniCorpusSpec {
  std::string out_dir;
  int size = 400;  // divisible by 40: 4 classes x 5 sessions x 2 speakers
  uint64_t seed = 1;
};

// Generates vowel-like utterances (harmonic source shaped by a formant
// envelope), writes WAVs plus manifest.jsonl under out_dir, and returns the
// records. Ten speakers span base-pitch multipliers 0.8 to 1.3; each of the
// five sessions holds one low and one high voice.
std::vector<UtteranceRecord> synth_minicorpus(const MiniCorpusSpec& spec);

// One synthetic utterance, exposed so tests can probe the generator
// directly. speaker_mult scales the class base pitch.
audio::Waveform synth_utterance(Label label, double speaker_mult, Rng& rng);

// Writes the augmentation and degradation assets under out_dir:
//   noise/*.wav + noise/clips.jsonl   tagged clips, some curated out
//   ir/*.wav                          training room responses
//   test_rir.wav                      held-out room for the degraded set
//   ego_noise.wav                     broadband robot-head bed
void synth_assets(const std::string& out_dir, uint64_t seed);

}  // namespace serkit::corpus

#endif  // SERKIT_CORPUS_SYNTH_H_
