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

#include "tvgd/vgf.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "tvgd/error.hpp"

namespace tvgd {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

class Cursor {
 public:
  Cursor(const std::vector<std::uint8_t>& bytes, const std::string& origin)
      : bytes_(bytes), origin_(origin) {}

  std::uint32_t u32(const std::string& what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
      v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
    }
    pos_ += 4;
    return v;
  }

  std::int32_t i32(const std::string& what) {
    return static_cast<std::int32_t>(u32(what));
  }

  float f32(const std::string& what) {
    const std::uint32_t bits = u32(what);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t pos() const { return pos_; }

  void need(std::size_t n, const std::string& what) {
    if (remaining() < n) {
      throw ValidationError(origin_ + ": size mismatch at " + what +
                            " (need " + std::to_string(n) + " bytes, " +
                            std::to_string(remaining()) + " left)");
    }
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_features(const Dataset& videos) {
  std::vector<std::uint8_t> out;
  out.push_back('V');
  out.push_back('G');
  out.push_back('F');
  out.push_back('1');
  put_u32(out, kVgfVersion);
  put_u32(out, static_cast<std::uint32_t>(videos.size()));
  for (const auto& v : videos) {
    if (v.frame_count() == 0 || v.dim() == 0) {
      throw ValidationError("write_features: empty video '" + v.video_id + "'");
    }
    put_u32(out, static_cast<std::uint32_t>(v.label));
    put_u32(out, static_cast<std::uint32_t>(v.frame_count()));
    put_u32(out, static_cast<std::uint32_t>(v.dim()));
    for (std::size_t i = 0; i < v.frames.size(); ++i) {
      put_f32(out, static_cast<float>(v.frames.data()[i]));
    }
  }
  return out;
}

Dataset decode_features(const std::vector<std::uint8_t>& bytes,
                        const std::string& origin, Domain domain) {
  Cursor cur(bytes, origin);
  cur.need(4, "magic");
  if (std::memcmp(bytes.data(), "VGF1", 4) != 0) {
    throw ValidationError(origin + ": not a VGF1 file");
  }
  (void)cur.u32("magic");
  const std::uint32_t version = cur.u32("version");
  if (version != kVgfVersion) {
    throw ValidationError(origin + ": unsupported VGF1 version " +
                          std::to_string(version));
  }
  const std::uint32_t count = cur.u32("video count");

  // First pass: verify the declared sizes account for the whole payload
  // before any allocation happens.
  {
    Cursor scan(bytes, origin);
    (void)scan.u32("magic");
    (void)scan.u32("version");
    (void)scan.u32("video count");
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::string rec = "video " + std::to_string(i);
      (void)scan.i32(rec + " label");
      const std::uint64_t frames = scan.u32(rec + " frame count");
      const std::uint64_t dim = scan.u32(rec + " dim");
      if (frames == 0 || dim == 0) {
        throw ValidationError(origin + ": " + rec + " declares zero frames or dim");
      }
      const std::uint64_t payload = frames * dim * 4ull;
      if (payload > scan.remaining()) {
        throw ValidationError(origin + ": size mismatch at " + rec +
                              " (payload " + std::to_string(payload) +
                              " bytes, " + std::to_string(scan.remaining()) +
                              " left)");
      }
      scan.need(payload, rec + " payload");
      for (std::uint64_t skip = 0; skip < frames * dim; ++skip) {
        (void)scan.u32(rec);
      }
    }
    if (scan.remaining() != 0) {
      throw ValidationError(origin + ": " + std::to_string(scan.remaining()) +
                            " trailing bytes after the last record");
    }
  }

  Dataset out;
  out.reserve(count);
  const std::string stem = std::filesystem::path(origin).stem().string();
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string rec = "video " + std::to_string(i);
    FrameFeatureSequence seq;
    seq.video_id = stem + "#" + std::to_string(i);
    seq.domain = domain;
    seq.label = cur.i32(rec + " label");
    const std::uint32_t frames = cur.u32(rec + " frame count");
    const std::uint32_t dim = cur.u32(rec + " dim");
    seq.frames = Tensor2(frames, dim);
    for (std::size_t j = 0; j < seq.frames.size(); ++j) {
      seq.frames.data()[j] = static_cast<double>(cur.f32(rec));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

void write_features(const Dataset& videos, const std::string& path) {
  const auto bytes = encode_features(videos);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ValidationError("write_features: cannot open '" + path + "'");
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write_features: short write to '" + path + "'");
}

Dataset read_features(const std::string& path, Domain domain) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("read_features: cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode_features(bytes, path, domain);
}

}  // namespace tvgd
