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

#ifndef TVGD_GNN_HPP
#define TVGD_GNN_HPP

#include <array>
#include <string>
#include <vector>

#include "tvgd/model.hpp"
#include "tvgd/tape.hpp"
#include "tvgd/video_graph.hpp"

namespace tvgd {

/// Directed edge list grouped by destination node (self-loops included),
/// with segment offsets per destination. This is the working adjacency for
/// attention and pooling; it stays O(edges), never dense.
struct GraphStructure {
  int n = 0;
  std::vector<int> dst;  // grouped: all edges into node 0, then node 1, ...
  std::vector<int> src;
  std::vector<int> seg;  // n + 1 offsets into dst/src
  bool self_loops = true;
};

GraphStructure graph_structure(const VideoGraph& g);

/// Applies the two-layer frame encoder row-wise: T x d_in -> T x d_h.
ValueRef encode_frames(Tape& t, ValueRef frames, const FrameEncoderParams& p);

struct GatResult {
  ValueRef nodes;      // n x d_h, ELU of attention-weighted neighbor sums
  ValueRef attention;  // E x 1, per directed edge, rows sum to 1 per node
};

/// One graph-attention layer: logits leakyReLU(a_dst . Wv_m + a_src . Wv_n)
/// per edge (m <- n), softmax over each destination's neighborhood, ELU on
/// the weighted neighbor sum. `prefix` names the layer's params on the tape.
GatResult gat_forward(Tape& t, ValueRef v, const GraphStructure& g,
                      const GatLayerParams& p, const std::string& prefix);

struct PoolResult {
  ValueRef nodes;            // C x d_h
  GraphStructure graph;      // contracted adjacency
  std::vector<int> cluster_of;  // original node -> cluster
};

/// Edge pooling: scores every non-loop edge from its endpoint features,
/// greedily contracts a matching in descending score order (ties toward the
/// smaller edge index), merges matched endpoints as sigmoid(score) * (v_m +
/// v_n), and passes unmatched nodes through unscaled.
PoolResult edge_pool(Tape& t, ValueRef v, const GraphStructure& g,
                     const EdgePoolParams& p, const std::string& prefix);

/// [column means ; column maxima], 1 x 2d.
ValueRef readout(Tape& t, ValueRef v);

struct LayerAttention {
  std::vector<int> dst;
  std::vector<int> src;
  ValueRef alpha;
};

/// Per-layer readouts and their sum (the video feature H), plus attention
/// weights for export. Layer l applies attention then pooling; the readout
/// is taken on the pooled node set.
struct VideoEmbedding {
  std::array<ValueRef, 3> h;
  ValueRef video_feature;  // h1 + h2 + h3, 1 x 2 d_h
  std::array<LayerAttention, 3> attention;
  std::array<std::vector<int>, 3> cluster_of;
};

/// The three-layer graph module on encoded node features v0 (T x d_h).
/// `prefix` scopes the parameter names (one model per tape is typical).
VideoEmbedding video_embed(Tape& t, ValueRef v0, const GraphStructure& g,
                           const ModelParams& params);

}  // namespace tvgd

#endif  // TVGD_GNN_HPP
