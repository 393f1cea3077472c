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

#ifndef TVGD_VIDEO_GRAPH_HPP
#define TVGD_VIDEO_GRAPH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tvgd/tensor.hpp"

namespace tvgd {

enum class Domain : std::uint8_t { kSource, kTarget };

enum class EdgeKind : std::uint8_t { kTemporal, kSimilarity, kSelfLoop };

const char* edge_kind_name(EdgeKind k);

/// One video as an ordered sequence of frame feature vectors (T x d).
/// label = -1 means unlabeled; target labels, when present, are only ever
/// used for evaluation.
struct FrameFeatureSequence {
  std::string video_id;
  Domain domain = Domain::kSource;
  int label = -1;
  Tensor2 frames;

  std::size_t frame_count() const { return frames.rows(); }
  std::size_t dim() const { return frames.cols(); }
};

/// Per-video frame graph: the temporal chain plus per-node top-k
/// visual-similarity edges, symmetrized, with optional self-loops.
///
/// Adjacency is CSR-style sorted neighbor lists (one directed entry per
/// direction); a dense matrix is available only as a small-graph debug path.
struct VideoGraph {
  Tensor2 node_features;            // T x d
  std::vector<int> nbr_offsets;     // T + 1
  std::vector<int> nbrs;            // sorted within each node's range
  std::vector<EdgeKind> kinds;      // parallel to nbrs
  int k_similarity = 0;
  bool self_loops = true;

  std::size_t node_count() const { return node_features.rows(); }
  std::size_t directed_edge_count() const { return nbrs.size(); }
  bool has_edge(int m, int n) const;
  /// Kind of edge (m, n); throws if absent.
  EdgeKind edge_kind(int m, int n) const;
  /// Debug path for T <= 512 only; larger graphs must stay sparse.
  Tensor2 dense_adjacency() const;
};

/// Uniform temporal sampling to exactly n frames: indices
/// round(j * (T-1) / (n-1)) for j = 0..n-1 (index 0 when n == 1).
/// Upsamples by nearest-index repetition when T < n.
FrameFeatureSequence sample_frames(const FrameFeatureSequence& seq, int n);

/// Builds the frame graph. Each node selects its k nearest other nodes by
/// Euclidean distance (ties broken toward the smaller frame index), the
/// selections are symmetrized and unioned with the temporal chain; an edge
/// that is both temporal and selected stays temporal.
VideoGraph build_video_graph(const FrameFeatureSequence& seq, int k = 5,
                             bool self_loops = true);

/// Returns one entry per violated VideoGraph invariant; empty means valid.
std::vector<std::string> validate_graph(const VideoGraph& g);

}  // namespace tvgd

#endif  // TVGD_VIDEO_GRAPH_HPP
