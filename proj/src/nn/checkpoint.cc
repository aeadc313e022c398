// nn/checkpoint.cc

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

#include "nn/checkpoint.h"

#include <cstring>

#include "util/common.h"
#include "util/error.h"

namespace serkit::nn {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'K', 'P'};
constexpr uint32_t kVersion = 1;

void append_u32(std::string* buf, uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  buf->append(b, 4);
}

void append_u64(std::string* buf, uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  buf->append(b, 8);
}

class Reader {
 public:
  Reader(const std::vector<unsigned char>& buf, const std::string& path)
      : buf_(buf), path_(path) {}

  const unsigned char* take(size_t n) {
    if (off_ + n > buf_.size()) {
      throw DataError("truncated checkpoint: " + path_);
    }
    const unsigned char* p = buf_.data() + off_;
    off_ += n;
    return p;
  }
  uint32_t u32() {
    uint32_t v;
    std::memcpy(&v, take(4), 4);
    return v;
  }
  uint64_t u64() {
    uint64_t v;
    std::memcpy(&v, take(8), 8);
    return v;
  }
  bool done() const { return off_ == buf_.size(); }

 private:
  const std::vector<unsigned char>& buf_;
  std::string path_;
  size_t off_ = 0;
};

}  // namespace

void Checkpoint::save(const std::string& path) const {
  std::string buf;
  buf.append(kMagic, 4);
  append_u32(&buf, kVersion);
  const std::string meta_text = meta.dump();
  append_u64(&buf, meta_text.size());
  buf.append(meta_text);
  append_u32(&buf, static_cast<uint32_t>(tensors.size()));
  for (const auto& [name, m] : tensors) {
    append_u32(&buf, static_cast<uint32_t>(name.size()));
    buf.append(name);
    append_u64(&buf, static_cast<uint64_t>(m.rows()));
    append_u64(&buf, static_cast<uint64_t>(m.cols()));
    buf.append(reinterpret_cast<const char*>(m.data()),
               sizeof(double) * m.size());
  }
  write_binary_file(path, buf.data(), buf.size());
}

Checkpoint Checkpoint::load(const std::string& path) {
  const std::vector<unsigned char> buf = read_binary_file(path);
  Reader r(buf, path);
  if (std::memcmp(r.take(4), kMagic, 4) != 0) {
    throw DataError("not a checkpoint: " + path);
  }
  const uint32_t version = r.u32();
  if (version != kVersion) {
    throw DataError("unsupported checkpoint version " +
                    std::to_string(version) + " in " + path);
  }
  Checkpoint ckpt;
  const uint64_t meta_len = r.u64();
  const unsigned char* meta_bytes = r.take(meta_len);
  ckpt.meta = nlohmann::json::parse(
      std::string(reinterpret_cast<const char*>(meta_bytes), meta_len));
  const uint32_t count = r.u32();
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = r.u32();
    const std::string name(
        reinterpret_cast<const char*>(r.take(name_len)), name_len);
    const uint64_t rows = r.u64();
    const uint64_t cols = r.u64();
    Eigen::MatrixXd m(rows, cols);
    std::memcpy(m.data(), r.take(sizeof(double) * rows * cols),
                sizeof(double) * rows * cols);
    ckpt.tensors[name] = std::move(m);
  }
  if (!r.done()) throw DataError("trailing bytes in checkpoint: " + path);
  return ckpt;
}

}  // namespace serkit::nn
