// Copyright 2026 The tvgd Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tvgd/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "tvgd/error.hpp"

namespace tvgd {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
  }
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
  }
}

void put_str(std::vector<std::uint8_t>& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

class Cursor {
 public:
  Cursor(const std::vector<std::uint8_t>& bytes, const std::string& origin)
      : bytes_(bytes), origin_(origin) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 4;
    return v;
  }

  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 8;
    return v;
  }

  std::string str(const char* what) {
    const std::uint32_t len = u32(what);
    need(len, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
    pos_ += len;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) {
    if (remaining() < n) {
      throw ValidationError(origin_ + ": truncated checkpoint at " +
                            std::string(what));
    }
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  std::map<std::string, std::string> kv = ckpt.config;
  kv["epoch"] = std::to_string(ckpt.epoch);
  kv["metric_history"] = ckpt.metric_history;

  std::vector<std::uint8_t> out;
  out.push_back('T');
  out.push_back('V');
  out.push_back('G');
  out.push_back('D');
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(kv.size()));
  for (const auto& [k, v] : kv) {
    put_str(out, k);
    put_str(out, v);
  }
  put_u32(out, static_cast<std::uint32_t>(ckpt.params.size()));
  for (const auto& [name, t] : ckpt.params) {
    put_str(out, name);
    put_u32(out, static_cast<std::uint32_t>(t.rows()));
    put_u32(out, static_cast<std::uint32_t>(t.cols()));
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, t.data() + i, 8);
      put_u64(out, bits);
    }
  }
  return out;
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes,
                             const std::string& origin) {
  Cursor cur(bytes, origin);
  cur.need(4, "magic");
  if (std::memcmp(bytes.data(), "TVGD", 4) != 0) {
    throw ValidationError(origin + ": not a TVGD checkpoint");
  }
  (void)cur.u32("magic");
  const std::uint32_t version = cur.u32("version");
  if (version != kCheckpointVersion) {
    throw ValidationError(origin + ": unsupported checkpoint version " +
                          std::to_string(version));
  }
  Checkpoint ckpt;
  const std::uint32_t kv_count = cur.u32("config entry count");
  for (std::uint32_t i = 0; i < kv_count; ++i) {
    std::string k = cur.str("config key");
    std::string v = cur.str("config value");
    ckpt.config[std::move(k)] = std::move(v);
  }
  if (auto it = ckpt.config.find("epoch"); it != ckpt.config.end()) {
    ckpt.epoch = std::stoi(it->second);
    ckpt.config.erase(it);
  }
  if (auto it = ckpt.config.find("metric_history"); it != ckpt.config.end()) {
    ckpt.metric_history = it->second;
    ckpt.config.erase(it);
  }
  const std::uint32_t n_params = cur.u32("param count");
  for (std::uint32_t i = 0; i < n_params; ++i) {
    std::string name = cur.str("param name");
    const std::uint32_t rows = cur.u32("param rows");
    const std::uint32_t cols = cur.u32("param cols");
    const std::uint64_t count =
        static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols);
    if (count * 8ull > cur.remaining()) {
      throw ValidationError(origin + ": size mismatch at param '" + name + "'");
    }
    Tensor2 t(rows, cols);
    for (std::size_t j = 0; j < t.size(); ++j) {
      const std::uint64_t bits = cur.u64("param data");
      std::memcpy(t.data() + j, &bits, 8);
    }
    ckpt.params.emplace(std::move(name), std::move(t));
  }
  if (cur.remaining() != 0) {
    throw ValidationError(origin + ": trailing bytes after the last parameter");
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  const auto bytes = encode_checkpoint(ckpt);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ValidationError("save_checkpoint: cannot open '" + path + "'");
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("save_checkpoint: short write to '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("load_checkpoint: cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes, path);
}

}  // namespace tvgd
