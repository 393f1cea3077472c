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

#ifndef TVGD_CHECKPOINT_HPP
#define TVGD_CHECKPOINT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tvgd/tensor.hpp"

namespace tvgd {

// Checkpoint container, little-endian:
//   magic "TVGD" | version u32 |
//   entry count u32 | per entry: key len u32, key, value len u32, value |
//   param count u32 | per param: name len u32, name, rows u32, cols u32,
//                                rows*cols float64
// The config block holds the full training configuration snapshot plus the
// reserved keys "epoch" and "metric_history" (the CSV log). Keys and
// parameter names are written in sorted order, so save -> load -> save
// reproduces the file byte for byte.

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::map<std::string, std::string> config;
  int epoch = 0;
  std::string metric_history;  // CSV text
  std::map<std::string, Tensor2> params;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes,
                             const std::string& origin);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace tvgd

#endif  // TVGD_CHECKPOINT_HPP
