// pipeline/png_writer.h

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

#ifndef SERKIT_PIPELINE_PNG_WRITER_H_
#define SERKIT_PIPELINE_PNG_WRITER_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace serkit::pipeline {

// Writes an 8-bit RGB PNG (one zlib-compressed IDAT chunk). `rgb` holds
// width*height*3 bytes in row-major order.
void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<uint8_t>& rgb);

// Row-normalized confusion heatmap with a light grid; cell brightness
// follows the share of the true class routed to each prediction.
void write_confusion_png(const std::array<std::array<long, 4>, 4>& confusion,
                         const std::string& path, int cell_px = 64);

}  // namespace serkit::pipeline

#endif  // SERKIT_PIPELINE_PNG_WRITER_H_
