// util/common.h

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

#ifndef SERKIT_UTIL_COMMON_H_
#define SERKIT_UTIL_COMMON_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace serkit {

// FNV-1a 64-bit over raw bytes; used for cache keys and asset provenance.
uint64_t hash_bytes(const void* data, size_t n, uint64_t seed = 0xcbf29ce484222325ULL);
uint64_t hash_string(const std::string& s);
std::string hash_hex(uint64_t h);

// Content hash of a file on disk.
uint64_t hash_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::vector<unsigned char> read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path,
                       const void* data, size_t n);

// Runs fn(i) for i in [0, n). jobs <= 1 runs inline; otherwise a small
// thread pool. fn must only touch per-index state.
void parallel_for(size_t n, const std::function<void(size_t)>& fn, int jobs = 1);

}  // namespace serkit

#endif  // SERKIT_UTIL_COMMON_H_
