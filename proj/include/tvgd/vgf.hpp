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

#ifndef TVGD_VGF_HPP
#define TVGD_VGF_HPP

#include <string>
#include <vector>

#include "tvgd/video_graph.hpp"

namespace tvgd {

using Dataset = std::vector<FrameFeatureSequence>;

// VGF1 frame-feature container, little-endian throughout:
//   magic "VGF1" | version u32 | video count u32 |
//   per video: label i32 (-1 = unlabeled) | frame count u32 | dim u32 |
//              frame*dim float32 row-major
// Feature dims may differ between videos but must be consistent within a
// record. Values are stored at 32-bit precision (how extracted features
// ship); compute stays double.

inline constexpr std::uint32_t kVgfVersion = 1;

void write_features(const Dataset& videos, const std::string& path);

/// Validates magic, version, and size accounting against the file length
/// before allocating any payload. The domain tag and (file stem)#index ids
/// are assigned by the caller's context, not stored in the file.
Dataset read_features(const std::string& path, Domain domain = Domain::kSource);

/// In-memory variants used by the reader/writer and the corruption tests.
std::vector<std::uint8_t> encode_features(const Dataset& videos);
Dataset decode_features(const std::vector<std::uint8_t>& bytes,
                        const std::string& origin, Domain domain);

}  // namespace tvgd

#endif  // TVGD_VGF_HPP
