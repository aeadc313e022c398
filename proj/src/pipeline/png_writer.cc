// pipeline/png_writer.cc

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

#include "pipeline/png_writer.h"

#include <zlib.h>

#include <cstring>

#include "util/common.h"
#include "util/error.h"

namespace serkit::pipeline {

namespace {

void push_u32(std::vector<uint8_t>* out, uint32_t v) {
  out->push_back(static_cast<uint8_t>(v >> 24));
  out->push_back(static_cast<uint8_t>(v >> 16));
  out->push_back(static_cast<uint8_t>(v >> 8));
  out->push_back(static_cast<uint8_t>(v));
}

void push_chunk(std::vector<uint8_t>* out, const char type[4],
                const std::vector<uint8_t>& payload) {
  push_u32(out, static_cast<uint32_t>(payload.size()));
  const size_t crc_start = out->size();
  out->insert(out->end(), type, type + 4);
  out->insert(out->end(), payload.begin(), payload.end());
  const uLong crc =
      crc32(0L, out->data() + crc_start, static_cast<uInt>(4 + payload.size()));
  push_u32(out, static_cast<uint32_t>(crc));
}

}  // namespace

void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<uint8_t>& rgb) {
  if (width <= 0 || height <= 0) throw ConfigError("png size must be positive");
  if (rgb.size() != static_cast<size_t>(width) * height * 3) {
    throw ConfigError("rgb buffer does not match png dimensions");
  }
  // Raw image stream: each scanline gets a leading filter byte (0 = none).
  std::vector<uint8_t> raw;
  raw.reserve(static_cast<size_t>(height) * (1 + 3 * width));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);
    const uint8_t* row = rgb.data() + static_cast<size_t>(y) * width * 3;
    raw.insert(raw.end(), row, row + 3 * width);
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> compressed(bound);
  if (compress2(compressed.data(), &bound, raw.data(),
                static_cast<uLong>(raw.size()), 9) != Z_OK) {
    throw DataError("zlib compression failed for " + path);
  }
  compressed.resize(bound);

  std::vector<uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<uint8_t> ihdr;
  push_u32(&ihdr, static_cast<uint32_t>(width));
  push_u32(&ihdr, static_cast<uint32_t>(height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // truecolor
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // adaptive filtering
  ihdr.push_back(0);  // no interlace
  push_chunk(&png, "IHDR", ihdr);
  push_chunk(&png, "IDAT", compressed);
  push_chunk(&png, "IEND", {});
  write_binary_file(path, png.data(), png.size());
}

void write_confusion_png(const std::array<std::array<long, 4>, 4>& confusion,
                         const std::string& path, int cell_px) {
  if (cell_px < 4) throw ConfigError("cell_px too small");
  const int n = 4;
  const int side = n * cell_px + (n + 1);  // 1px grid lines
  std::vector<uint8_t> rgb(static_cast<size_t>(side) * side * 3, 230);
  for (int t = 0; t < n; ++t) {
    long row_sum = 0;
    for (int p = 0; p < n; ++p) row_sum += confusion[t][p];
    for (int p = 0; p < n; ++p) {
      const double share =
          row_sum > 0 ? static_cast<double>(confusion[t][p]) / row_sum : 0.0;
      // Cold-to-warm ramp: empty cells stay pale blue, full cells go red.
      const uint8_t r = static_cast<uint8_t>(40 + 215 * share);
      const uint8_t g = static_cast<uint8_t>(60 + 40 * (1.0 - share));
      const uint8_t b = static_cast<uint8_t>(70 + 185 * (1.0 - share));
      const int y0 = 1 + t * (cell_px + 1);
      const int x0 = 1 + p * (cell_px + 1);
      for (int y = y0; y < y0 + cell_px; ++y) {
        for (int x = x0; x < x0 + cell_px; ++x) {
          uint8_t* px = rgb.data() + (static_cast<size_t>(y) * side + x) * 3;
          px[0] = r;
          px[1] = g;
          px[2] = b;
        }
      }
    }
  }
  write_png_rgb(path, side, side, rgb);
}

}  // namespace serkit::pipeline
