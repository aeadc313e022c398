// audio/wav_io.cc

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

#include "audio/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "audio/dsp.h"

namespace serkit::audio {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatIeeeFloat = 3;

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

[[noreturn]] void malformed(const std::string& what) {
  throw WavError(WavError::Kind::kMalformedHeader, "malformed WAV: " + what);
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw WavError(WavError::Kind::kMissingFile, "no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) {
    throw WavError(WavError::Kind::kMissingFile, "cannot open: " + path.string());
  }
  const auto file_size = static_cast<size_t>(in.tellg());
  in.seekg(0);
  std::vector<unsigned char> buf(file_size);
  if (file_size > 0) in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(file_size));

  if (file_size < 44) malformed("file too short");
  if (std::memcmp(buf.data(), "RIFF", 4) != 0 || std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    malformed("missing RIFF/WAVE magic");
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char* data_ptr = nullptr;
  size_t data_len = 0;
  bool have_fmt = false;

  size_t pos = 12;
  while (pos + 8 <= file_size) {
    const unsigned char* chunk = buf.data() + pos;
    const uint32_t chunk_len = read_u32(chunk + 4);
    const size_t body = pos + 8;
    if (body + chunk_len > file_size) malformed("chunk overruns file");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_len < 16) malformed("fmt chunk too short");
      format = read_u16(buf.data() + body);
      channels = read_u16(buf.data() + body + 2);
      rate = read_u32(buf.data() + body + 4);
      bits = read_u16(buf.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data_ptr = buf.data() + body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_ptr == nullptr) malformed("missing fmt or data chunk");
  if (channels == 0 || rate == 0) malformed("zero channels or sample rate");
  if (!((format == kFormatPcm && bits == 16) ||
        (format == kFormatIeeeFloat && bits == 32))) {
    throw WavError(WavError::Kind::kUnsupportedCodec,
                   "unsupported WAV codec: format=" + std::to_string(format) +
                       " bits=" + std::to_string(bits));
  }

  const size_t bytes_per_sample = bits / 8;
  const size_t frame_bytes = bytes_per_sample * channels;
  if (frame_bytes == 0 || data_len % frame_bytes != 0) malformed("data size not frame-aligned");
  const size_t frames = data_len / frame_bytes;

  Waveform w;
  w.sample_rate_hz = static_cast<int>(rate);
  w.samples.resize(frames);
  const double inv_channels = channels > 0 ? 1.0 / channels : 0.0;
  for (size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data_ptr + (i * channels + c) * bytes_per_sample;
      if (format == kFormatPcm) {
        const auto v = static_cast<int16_t>(read_u16(p));
        acc += static_cast<double>(v) / 32768.0;
      } else {
        float f;
        std::memcpy(&f, p, 4);
        acc += static_cast<double>(f);
      }
    }
    w.samples[i] = std::clamp(acc * inv_channels, -1.0, 1.0);
  }
  return w;
}

Waveform read_wav_at(const std::filesystem::path& path, int rate_hz) {
  return resample(read_wav(path), rate_hz);
}

void write_wav(const std::filesystem::path& path, const Waveform& w, WavFormat format) {
  const uint16_t channels = 1;
  const uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const uint16_t fmt_code = format == WavFormat::kPcm16 ? kFormatPcm : kFormatIeeeFloat;
  const auto n = static_cast<uint32_t>(w.samples.size());
  const uint32_t data_len = n * (bits / 8);

  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  put_u32(out, 36 + data_len);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, fmt_code);
  put_u16(out, channels);
  put_u32(out, static_cast<uint32_t>(w.sample_rate_hz));
  put_u32(out, static_cast<uint32_t>(w.sample_rate_hz) * channels * (bits / 8));
  put_u16(out, static_cast<uint16_t>(channels * (bits / 8)));
  put_u16(out, bits);
  out += "data";
  put_u32(out, data_len);

  if (format == WavFormat::kPcm16) {
    for (double x : w.samples) {
      const double scaled = std::round(std::clamp(x, -1.0, 1.0) * 32768.0);
      const auto v = static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
      put_u16(out, static_cast<uint16_t>(v));
    }
  } else {
    for (double x : w.samples) {
      const auto f = static_cast<float>(std::clamp(x, -1.0, 1.0));
      uint32_t raw;
      std::memcpy(&raw, &f, 4);
      put_u32(out, raw);
    }
  }

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write WAV: " + path.string());
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw DataError("short WAV write: " + path.string());
}

ImpulseResponse read_ir(const std::filesystem::path& path, int rate_hz) {
  const Waveform w = read_wav_at(path, rate_hz);
  ImpulseResponse ir;
  ir.sample_rate_hz = rate_hz;
  ir.taps = w.samples;
  double energy = 0.0;
  for (double t : ir.taps) energy += t * t;
  if (ir.taps.empty() || energy <= 0.0) {
    throw DataError("impulse response has no energy: " + path.string());
  }
  return ir;
}

}  // namespace serkit::audio
