// audio/wav_io.h

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

#ifndef SERKIT_AUDIO_WAV_IO_H_
#define SERKIT_AUDIO_WAV_IO_H_

#include <filesystem>

#include "audio/waveform.h"
#include "util/error.h"

namespace serkit::audio {

class WavError : public serkit::DataError {
 public:
  enum class Kind { kMissingFile, kMalformedHeader, kUnsupportedCodec };

  WavError(Kind kind, const std::string& msg) : DataError(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class WavFormat { kPcm16, kFloat32 };

// Reads a RIFF/WAVE file (PCM16 or IEEE float32). Multichannel input is
// downmixed by channel averaging; samples end up in [-1, 1]. The waveform
// keeps the file's native sample rate.
Waveform read_wav(const std::filesystem::path& path);

// read_wav followed by windowed-sinc resampling to rate_hz.
Waveform read_wav_at(const std::filesystem::path& path, int rate_hz);

void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavFormat format = WavFormat::kPcm16);

// Loads an impulse response from a WAV file, resampled to rate_hz.
ImpulseResponse read_ir(const std::filesystem::path& path, int rate_hz);

}  // namespace serkit::audio

#endif  // SERKIT_AUDIO_WAV_IO_H_
