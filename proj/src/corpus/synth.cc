// corpus/synth.cc

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

#include "corpus/synth.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "audio/wav_io.h"
#include "util/error.h"

namespace serkit::corpus {

namespace {

constexpr int kSr = audio::kCanonicalRateHz;

struct Vowel {
  double f1, f2;
};

// Five vowel targets; F3 is fixed at 2700 Hz.
const Vowel kVowels[5] = {
    {800.0, 1200.0}, {500.0, 1800.0}, {300.0, 2300.0},
    {450.0, 800.0},  {325.0, 700.0}};

double formant_envelope(double f, const Vowel& v) {
  const double f3 = 2700.0;
  const double b1 = 90.0, b2 = 110.0, b3 = 150.0;
  auto peak = [](double f, double fc, double bw, double g) {
    const double d = (f - fc) / bw;
    return g / (1.0 + d * d);
  };
  return peak(f, v.f1, b1, 1.0) + peak(f, v.f2, b2, 0.7) +
         peak(f, f3, b3, 0.3);
}

// Voiced vowel segment: additive harmonics under a formant envelope, with
// vibrato and a slow random pitch drift.
void render_syllable(std::vector<double>* out, size_t start, size_t len,
                     double f0, double f0_var, const Vowel& vowel, Rng& rng) {
  const double vib_hz = rng.uniform(3.0, 6.0);
  const double vib_phase = rng.uniform(0.0, 2.0 * M_PI);
  const double drift = rng.uniform(-0.06, 0.06);  // relative drift over the syllable
  double phase = rng.uniform(0.0, 2.0 * M_PI);

  const int max_h = std::max(1, static_cast<int>(5000.0 / f0));
  std::vector<double> amp(max_h + 1, 0.0);
  for (int h = 1; h <= max_h; ++h) {
    amp[h] = formant_envelope(h * f0, vowel) / h;
  }

  const size_t fade = std::min<size_t>(len / 4, kSr * 30 / 1000);
  for (size_t i = 0; i < len; ++i) {
    const double t = static_cast<double>(i) / kSr;
    const double frac = static_cast<double>(i) / len;
    const double f = f0 * (1.0 + f0_var * std::sin(2.0 * M_PI * vib_hz * t +
                                                   vib_phase) +
                           drift * frac);
    phase += 2.0 * M_PI * f / kSr;
    double s = 0.0;
    for (int h = 1; h <= max_h; ++h) s += amp[h] * std::sin(h * phase);
    double env = 1.0;
    if (i < fade) env = 0.5 - 0.5 * std::cos(M_PI * i / fade);
    if (len - 1 - i < fade) env = 0.5 - 0.5 * std::cos(M_PI * (len - 1 - i) / fade);
    (*out)[start + i] += env * s;
  }
}

audio::Waveform pcm_roundtrip_free(std::vector<double> samples) {
  audio::Waveform w;
  w.sample_rate_hz = kSr;
  w.samples = std::move(samples);
  return w;
}

double speaker_multiplier(int speaker_index) {
  // Session s pairs one low voice with one high voice.
  const int session = speaker_index / 2;
  if (speaker_index % 2 == 0) return 0.80 + 0.025 * session;
  return 1.10 + 0.05 * session;
}

// ---- asset synthesis helpers ----

std::vector<double> pink_noise(size_t n, Rng& rng, double sigma) {
  // Kellet three-pole pink approximation driven by white Gaussian noise.
  std::vector<double> out(n);
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double w = rng.next_gaussian();
    b0 = 0.99765 * b0 + w * 0.0990460;
    b1 = 0.96300 * b1 + w * 0.2965164;
    b2 = 0.57000 * b2 + w * 1.0526913;
    out[i] = sigma * (b0 + b1 + b2 + w * 0.1848);
  }
  return out;
}

void peak_normalize(std::vector<double>* x, double target) {
  double peak = 0.0;
  for (double v : *x) peak = std::max(peak, std::abs(v));
  if (peak < 1e-12) return;
  const double g = target / peak;
  for (double& v : *x) v = std::clamp(v * g, -1.0, 1.0);
}

std::vector<double> gen_knock(Rng& rng) {
  const size_t n = kSr * 5 / 2;
  std::vector<double> x(n, 0.0);
  const int hits = 3 + static_cast<int>(rng.next_below(4));
  for (int k = 0; k < hits; ++k) {
    const size_t at = rng.next_below(n - kSr / 4);
    const double f = rng.uniform(80.0, 150.0);
    const double tau = rng.uniform(0.02, 0.05) * kSr;
    for (size_t i = 0; i < static_cast<size_t>(kSr) / 5 && at + i < n; ++i) {
      x[at + i] += std::exp(-static_cast<double>(i) / tau) *
                   std::sin(2.0 * M_PI * f * i / kSr);
    }
  }
  return x;
}

std::vector<double> gen_beep(Rng& rng) {
  const size_t n = kSr * 3;
  std::vector<double> x(n, 0.0);
  const double f = rng.uniform(800.0, 2000.0);
  const size_t burst = kSr / 5;
  for (size_t at = 0; at + burst < n; at += burst * 2) {
    for (size_t i = 0; i < burst; ++i) {
      // Odd harmonics give the flat, electronic timbre.
      const double t = 2.0 * M_PI * f * i / kSr;
      x[at + i] = std::sin(t) + std::sin(3 * t) / 3 + std::sin(5 * t) / 5;
    }
  }
  return x;
}

std::vector<double> gen_crash(Rng& rng) {
  const size_t n = kSr * 2;
  std::vector<double> x(n, 0.0);
  const double tau = rng.uniform(0.15, 0.35) * kSr;
  for (size_t i = 0; i < n; ++i) {
    x[i] = rng.next_gaussian() * std::exp(-static_cast<double>(i) / tau);
  }
  return x;
}

std::vector<double> gen_alarm(Rng& rng) {
  const size_t n = kSr * 3;
  std::vector<double> x(n, 0.0);
  const double fa = rng.uniform(550.0, 700.0);
  const double fb = rng.uniform(850.0, 1000.0);
  const size_t seg = kSr / 4;
  for (size_t i = 0; i < n; ++i) {
    const double f = ((i / seg) % 2 == 0) ? fa : fb;
    x[i] = std::sin(2.0 * M_PI * f * i / kSr);
  }
  return x;
}

std::vector<double> gen_siren(Rng& rng) {
  const size_t n = kSr * 3;
  std::vector<double> x(n, 0.0);
  const double lo = rng.uniform(550.0, 650.0);
  const double hi = rng.uniform(1100.0, 1300.0);
  double phase = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSr;
    const double tri = std::abs(2.0 * (t * 0.5 - std::floor(t * 0.5 + 0.5)));
    const double f = lo + (hi - lo) * tri;
    phase += 2.0 * M_PI * f / kSr;
    x[i] = std::sin(phase);
  }
  return x;
}

std::vector<double> gen_babble(Rng& rng) {
  const size_t n = kSr * 3;
  std::vector<double> x(n, 0.0);
  for (int v = 0; v < 6; ++v) {
    double f = rng.uniform(140.0, 260.0);
    double phase = rng.uniform(0.0, 2.0 * M_PI);
    const double am_hz = rng.uniform(2.5, 5.0);
    const Vowel& vw = kVowels[rng.next_below(5)];
    for (size_t i = 0; i < n; ++i) {
      if (i % 160 == 0) f += rng.uniform(-3.0, 3.0);
      phase += 2.0 * M_PI * f / kSr;
      const double am =
          0.5 + 0.5 * std::sin(2.0 * M_PI * am_hz * i / kSr + v);
      double s = 0.0;
      for (int h = 1; h <= 8; ++h) {
        s += formant_envelope(h * f, vw) / h * std::sin(h * phase);
      }
      x[i] += am * s / 6.0;
    }
  }
  return x;
}

std::vector<double> gen_wind(Rng& rng) {
  std::vector<double> x = pink_noise(kSr * 3, rng, 0.3);
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] *= 0.6 + 0.4 * std::sin(2.0 * M_PI * 0.3 * i / kSr);
  }
  return x;
}

std::vector<double> gen_fan(Rng& rng) {
  // Box fan: broadband pink rumble with a blade-pass tone and mild wobble.
  std::vector<double> x = pink_noise(kSr * 4, rng, 0.3);
  const double blade_hz = rng.uniform(55.0, 90.0);
  for (size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / kSr;
    x[i] = x[i] * (0.85 + 0.15 * std::sin(2.0 * M_PI * 0.7 * t)) +
           0.25 * std::sin(2.0 * M_PI * blade_hz * t) +
           0.12 * std::sin(2.0 * M_PI * 2.0 * blade_hz * t);
  }
  return x;
}

std::vector<double> gen_vacuum(Rng& rng) {
  // Vacuum cleaner: pink bed plus a dense motor harmonic stack.
  std::vector<double> x = pink_noise(kSr * 3, rng, 0.25);
  const double motor_hz = rng.uniform(110.0, 160.0);
  for (size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / kSr;
    double tone = 0.0;
    for (int h = 1; h <= 6; ++h) {
      tone += std::sin(2.0 * M_PI * motor_hz * h * t + 0.7 * h) / (1.0 + h);
    }
    x[i] += 0.3 * tone;
  }
  return x;
}

std::vector<double> gen_synthfx(Rng& rng) {
  const size_t n = kSr * 2;
  std::vector<double> x(n, 0.0);
  const double beta = rng.uniform(3.0, 8.0);
  const double fc = rng.uniform(400.0, 900.0);
  const double fm = rng.uniform(40.0, 120.0);
  for (size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSr;
    x[i] = std::sin(2.0 * M_PI * fc * t + beta * std::sin(2.0 * M_PI * fm * t));
  }
  return x;
}

audio::ImpulseResponse gen_room_ir(Rng& rng, double rt60_s, int reflections) {
  audio::ImpulseResponse ir;
  ir.sample_rate_hz = kSr;
  const size_t n = static_cast<size_t>(rt60_s * kSr);
  ir.taps.assign(n, 0.0);
  ir.taps[0] = 1.0;
  for (int k = 0; k < reflections; ++k) {
    const size_t at = 48 + rng.next_below(kSr * 15 / 1000);
    const double amp = rng.uniform(0.25, 0.55) * (k % 2 == 0 ? 1.0 : -1.0);
    if (at < n) ir.taps[at] += amp;
  }
  // Diffuse tail decaying by 60 dB over rt60.
  const double tau = rt60_s * kSr / 6.91;
  for (size_t i = kSr / 200; i < n; ++i) {
    ir.taps[i] += 0.22 * rng.next_gaussian() *
                  std::exp(-static_cast<double>(i) / tau);
  }
  return ir;
}

}  // namespace

const ClassPrototype& class_prototype(Label l) {
  static const ClassPrototype protos[kNumClasses] = {
      // f0      var   peak  dur_lo dur_hi syl    arousal valence
      {220.0, 0.06, 0.50, 0.70, 0.90, 5, 7, 4.5, 1.5},   // Angry
      {190.0, 0.18, 0.45, 0.90, 1.20, 4, 6, 4.0, 4.5},   // Happy
      {150.0, 0.05, 0.25, 0.90, 1.20, 3, 5, 2.8, 3.0},   // Neutral
      {120.0, 0.03, 0.12, 1.20, 1.40, 2, 3, 1.8, 2.0}};  // Sad
  return protos[static_cast<int>(l)];
}

audio::Waveform synth_utterance(Label label, double speaker_mult, Rng& rng) {
  const ClassPrototype& p = class_prototype(label);
  const double dur = rng.uniform(p.dur_lo_s, p.dur_hi_s);
  const size_t n = static_cast<size_t>(dur * kSr);
  std::vector<double> x(n, 0.0);

  const int syllables =
      p.syl_lo + static_cast<int>(rng.next_below(
                     static_cast<uint64_t>(p.syl_hi - p.syl_lo + 1)));
  const double slot = static_cast<double>(n) / syllables;
  const double f0_utt =
      p.f0_base_hz * speaker_mult * (1.0 + 0.05 * rng.next_gaussian());

  for (int s = 0; s < syllables; ++s) {
    const size_t start = static_cast<size_t>(s * slot);
    const double fill = rng.uniform(0.65, 0.85);
    const size_t len =
        std::min(static_cast<size_t>(slot * fill), n - start);
    if (len < 200) continue;
    const Vowel& vowel = kVowels[rng.next_below(5)];
    const double f0_syl = f0_utt * (1.0 + 0.04 * rng.next_gaussian());
    render_syllable(&x, start, len, std::max(60.0, f0_syl), p.f0_var, vowel,
                    rng);
  }

  // Faint breath bed keeps silence regions off exact zero.
  for (size_t i = 0; i < n; ++i) x[i] += 0.002 * rng.next_gaussian();

  const double peak_target =
      std::clamp(p.intensity * (1.0 + 0.10 * rng.next_gaussian()), 0.05, 0.9);
  peak_normalize(&x, peak_target);
  return pcm_roundtrip_free(std::move(x));
}

std::vector<UtteranceRecord> synth_minicorpus(const MiniCorpusSpec& spec) {
  if (spec.size < 40 || spec.size % 40 != 0) {
    throw ConfigError("mini-corpus size must be a positive multiple of 40");
  }
  const std::filesystem::path out_dir(spec.out_dir);
  std::filesystem::create_directories(out_dir / "wav");

  Rng root(spec.seed);
  std::vector<UtteranceRecord> records;
  records.reserve(spec.size);

  for (int i = 0; i < spec.size; ++i) {
    const Label label = static_cast<Label>(i % kNumClasses);
    const int speaker_index = (i / kNumClasses) % 10;
    Rng rng = root.split("utt", static_cast<uint64_t>(i));

    const audio::Waveform w =
        synth_utterance(label, speaker_multiplier(speaker_index), rng);

    char id[64];
    std::snprintf(id, sizeof(id), "u%04d_spk%02d", i, speaker_index + 1);
    const std::string wav_path = (out_dir / "wav" / (std::string(id) + ".wav")).string();
    audio::write_wav(wav_path, w, audio::WavFormat::kPcm16);

    const ClassPrototype& p = class_prototype(label);
    UtteranceRecord r;
    r.id = id;
    // Manifest paths are relative to the manifest's directory.
    r.audio_path = "wav/" + std::string(id) + ".wav";
    r.session = speaker_index / 2 + 1;
    char spk[16];
    std::snprintf(spk, sizeof(spk), "spk%02d", speaker_index + 1);
    r.speaker = spk;
    r.raw_label = label_name(label);
    r.label = label;
    r.arousal = std::clamp(p.arousal + 0.3 * rng.next_gaussian(), 1.0, 5.0);
    r.valence = std::clamp(p.valence + 0.3 * rng.next_gaussian(), 1.0, 5.0);
    records.push_back(std::move(r));
  }

  write_manifest((out_dir / "manifest.jsonl").string(), records);
  return records;
}

void synth_assets(const std::string& out_dir, uint64_t seed) {
  namespace fs = std::filesystem;
  const fs::path root(out_dir);
  fs::create_directories(root / "noise");
  fs::create_directories(root / "ir");

  Rng rng(seed);
  std::vector<NoiseClip> clips;

  struct Gen {
    const char* id;
    std::vector<double> (*fn)(Rng&);
    std::vector<std::string> tags;
    double peak;
  };
  const std::vector<Gen> gens = {
      {"knock01", gen_knock, {"knock", "domestic-sounds"}, 0.6},
      {"knock02", gen_knock, {"knocking", "household"}, 0.6},
      {"beep01", gen_beep, {"beep", "alert"}, 0.5},
      {"beep02", gen_beep, {"beep", "warning"}, 0.5},
      {"crash01", gen_crash, {"crash", "accident"}, 0.6},
      {"crash02", gen_crash, {"break", "shatter"}, 0.6},
      {"alarm01", gen_alarm, {"alarm", "fire-alarm"}, 0.5},
      {"alarm02", gen_alarm, {"alarm", "warning"}, 0.5},
      {"siren01", gen_siren, {"siren", "warning"}, 0.5},
      {"tap01", gen_knock, {"tap", "kitchen"}, 0.5},
      {"fan01", gen_fan, {"household", "fan"}, 0.5},
      {"vacuum01", gen_vacuum, {"domestic-sounds", "appliance"}, 0.5},
      {"babble01", gen_babble, {"speech", "voice"}, 0.5},
      {"wind01", gen_wind, {"nature", "field-recording"}, 0.5},
      {"synthfx01", gen_synthfx, {"synthesizer", "sound-effect"}, 0.5},
      {"scream01", gen_siren, {"siren", "scream"}, 0.5},
  };

  for (const auto& g : gens) {
    Rng sub = rng.split(g.id);
    std::vector<double> x = g.fn(sub);
    peak_normalize(&x, g.peak);
    // Faint room tone under the events keeps every mixing window live even
    // when a short utterance tiles a quiet stretch of the clip.
    for (double& s : x) s += 0.003 * g.peak * sub.next_gaussian();
    audio::Waveform w;
    w.sample_rate_hz = kSr;
    w.samples = std::move(x);
    const std::string path = (root / "noise" / (std::string(g.id) + ".wav")).string();
    audio::write_wav(path, w, audio::WavFormat::kPcm16);
    NoiseClip c;
    c.id = g.id;
    // Paths in the index are relative to the index file's directory.
    c.audio_path = std::string(g.id) + ".wav";
    c.source = "local";
    c.tags.insert(g.tags.begin(), g.tags.end());
    clips.push_back(std::move(c));
  }
  write_clip_index((root / "noise" / "clips.jsonl").string(), clips);

  for (int k = 0; k < 4; ++k) {
    Rng sub = rng.split("ir", static_cast<uint64_t>(k));
    const double rt60 = 0.12 + 0.05 * k;
    const audio::ImpulseResponse ir = gen_room_ir(sub, rt60, 4);
    audio::Waveform w;
    w.sample_rate_hz = kSr;
    w.samples = ir.taps;
    peak_normalize(&w.samples, 0.9);
    char name[32];
    std::snprintf(name, sizeof(name), "ir%02d.wav", k + 1);
    audio::write_wav((root / "ir" / name).string(), w,
                     audio::WavFormat::kFloat32);
  }

  {
    // The held-out room: same family, near-field placement. The strong
    // direct path keeps reverb a secondary corruption next to the heavy
    // ego-noise bed a robot head mixes in.
    Rng sub = rng.split("test_rir");
    const audio::ImpulseResponse ir = gen_room_ir(sub, 0.12, 2);
    audio::Waveform w;
    w.sample_rate_hz = kSr;
    w.samples = ir.taps;
    peak_normalize(&w.samples, 0.9);
    audio::write_wav((root / "test_rir.wav").string(), w,
                     audio::WavFormat::kFloat32);
  }

  {
    // Robot-head bed: pink noise plus mains hum harmonics, 10 s.
    Rng sub = rng.split("ego");
    std::vector<double> x = pink_noise(kSr * 10, sub, 0.25);
    for (size_t i = 0; i < x.size(); ++i) {
      const double t = static_cast<double>(i) / kSr;
      x[i] += 0.12 * std::sin(2.0 * M_PI * 50.0 * t) +
              0.06 * std::sin(2.0 * M_PI * 100.0 * t + 0.7) +
              0.04 * std::sin(2.0 * M_PI * 150.0 * t + 1.9);
    }
    peak_normalize(&x, 0.5);
    audio::Waveform w;
    w.sample_rate_hz = kSr;
    w.samples = std::move(x);
    audio::write_wav((root / "ego_noise.wav").string(), w,
                     audio::WavFormat::kFloat32);
  }
}

}  // namespace serkit::corpus
