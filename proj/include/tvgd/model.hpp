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

#ifndef TVGD_MODEL_HPP
#define TVGD_MODEL_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "tvgd/tensor.hpp"

namespace tvgd {

enum class Backbone : std::uint8_t { kDann, kCdan };

const char* backbone_name(Backbone b);
Backbone backbone_from_name(const std::string& name);

/// All widths in one place. Paper defaults; the small acceptance slices
/// shrink every hidden width.
struct ModelDims {
  int d_in = 2048;
  int phi_hidden = 512;
  int d_h = 256;
  int n_classes = 12;
  int cls_hidden1 = 256;
  int cls_hidden2 = 128;
  int disc_hidden1 = 256;
  int disc_hidden2 = 128;
  Backbone backbone = Backbone::kDann;

  // CDAN discriminators consume feature (x) prediction outer products.
  int disc_f_in() const {
    return backbone == Backbone::kCdan ? d_h * n_classes : d_h;
  }
  int disc_v_in() const {
    return backbone == Backbone::kCdan ? 2 * d_h * n_classes : 2 * d_h;
  }
};

struct AffineParams {
  Tensor2 w;  // in x out
  Tensor2 b;  // 1 x out
};

/// Two-layer frame encoder d_in -> phi_hidden -> d_h.
struct FrameEncoderParams {
  AffineParams l1, l2;
};

/// One graph-attention layer: square weight (all layers share width so the
/// per-layer readouts can be summed) and the attention vector split into its
/// destination/source halves.
struct GatLayerParams {
  Tensor2 w;      // d_h x d_h
  Tensor2 a_dst;  // d_h x 1
  Tensor2 a_src;  // d_h x 1
  double leaky_slope = 0.2;
};

/// Edge scorer for pooling: affine map of the concatenated endpoint
/// features [v_dst ; v_src], stored as the two halves plus bias. Directed
/// edges are scored individually, so the matching is independent of node
/// labeling (up to exact score ties).
struct EdgePoolParams {
  Tensor2 w_dst;  // d_h x 1
  Tensor2 w_src;  // d_h x 1
  Tensor2 b;      // 1 x 1
};

struct MlpParams {
  AffineParams l1, l2, l3;
};

/// Every trainable tensor of the full pipeline.
struct ModelParams {
  ModelDims dims;
  FrameEncoderParams phi;
  std::array<GatLayerParams, 3> gat;
  std::array<EdgePoolParams, 3> pool;
  MlpParams classifier;  // 2 d_h -> c1 -> c2 -> K
  MlpParams frame_head;  // d_h -> c1 -> c2 -> K, CDAN's per-frame predictions
  MlpParams disc_f;      // frame-level discriminator, single logit
  MlpParams disc_v;      // video-level discriminator, single logit

  /// Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases.
  static ModelParams init(const ModelDims& dims, std::uint64_t seed);

  /// Stable name -> tensor view over all parameters (sorted by name).
  std::map<std::string, Tensor2*> named();
  std::map<std::string, const Tensor2*> named() const;

  std::size_t parameter_count() const;
};

}  // namespace tvgd

#endif  // TVGD_MODEL_HPP
