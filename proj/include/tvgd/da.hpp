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

#ifndef TVGD_DA_HPP
#define TVGD_DA_HPP

#include <vector>

#include "tvgd/gnn.hpp"
#include "tvgd/model.hpp"
#include "tvgd/tape.hpp"
#include "tvgd/video_graph.hpp"

namespace tvgd {

/// Adversarial alignment configuration. One gradient step on the returned
/// objective descends the classifier/encoder/graph parameters on
/// L_c - alpha * L_d and the discriminators on alpha * L_d simultaneously,
/// because the discriminator inputs pass through gradient reversal.
struct DaConfig {
  Backbone backbone = Backbone::kDann;
  double alpha = 1.0;        // trade-off on the domain losses
  double grl_lambda = 1.0;   // reversal strength (ceiling when ramped)
  bool grl_ramp = false;     // lambda *= 2/(1+exp(-10 progress)) - 1
  bool use_frame_disc = true;
  bool use_video_disc = true;
  double frame_head_ce_weight = 0.1;  // CDAN auxiliary frame-label CE
  bool grl_enabled = true;   // test hook: false routes features unreversed

  double effective_lambda(double progress) const;
};

/// Three-layer MLP with leaky-ReLU(0.2) between layers, linear output.
ValueRef mlp_forward(Tape& t, ValueRef x, const MlpParams& p,
                     const std::string& prefix);

/// Class logits for batched video features (N x 2 d_h).
ValueRef classify(Tape& t, ValueRef video_features, const MlpParams& p);

/// Flattened per-row outer product f (x) g for CDAN conditioning. Each row
/// of predictions must be a probability distribution (sum 1 +- 1e-6).
ValueRef cdan_condition(Tape& t, ValueRef features, ValueRef predictions);

/// Both adversarial losses for one mini-batch, with discriminator
/// domain-classification accuracies computed from the logits.
struct DomainLossResult {
  ValueRef l_df;  // invalid when the frame discriminator is disabled
  ValueRef l_dv;
  double disc_acc_f = -1.0;
  double disc_acc_v = -1.0;
};

/// DANN losses (frame + video level). Feature matrices are batched rows;
/// either level may be disabled in cfg. progress in [0,1] drives the
/// optional lambda ramp.
DomainLossResult dann_domain_loss(Tape& t, ValueRef frame_feats_src,
                                  ValueRef frame_feats_tgt,
                                  ValueRef video_feats_src,
                                  ValueRef video_feats_tgt,
                                  const ModelParams& params,
                                  const DaConfig& cfg, double progress);

/// CDAN losses: discriminators see feature (x) prediction outer products.
DomainLossResult cdan_domain_loss(
    Tape& t, ValueRef frame_feats_src, ValueRef frame_preds_src,
    ValueRef frame_feats_tgt, ValueRef frame_preds_tgt,
    ValueRef video_feats_src, ValueRef video_preds_src,
    ValueRef video_feats_tgt, ValueRef video_preds_tgt,
    const ModelParams& params, const DaConfig& cfg, double progress);

struct StepMetrics {
  double l_c = 0.0;
  double l_df = 0.0;
  double l_dv = 0.0;
  double disc_acc_f = -1.0;
  double disc_acc_v = -1.0;
  int src_correct = 0;
  int src_count = 0;
};

struct ObjectiveResult {
  ValueRef loss;  // the single scalar for the update step
  StepMetrics metrics;
};

struct PreparedVideo {
  const FrameFeatureSequence* seq = nullptr;  // already frame-sampled
  const VideoGraph* graph = nullptr;
};

/// Full objective for one mini-batch: source cross-entropy plus
/// alpha * (L_df + L_dv) with GRL inside, plus the CDAN auxiliary
/// frame-head CE. Source videos must be labeled.
ObjectiveResult total_objective(Tape& t,
                                const std::vector<PreparedVideo>& source,
                                const std::vector<PreparedVideo>& target,
                                const ModelParams& params, const DaConfig& cfg,
                                double progress);

/// Forward-only classification of a single prepared video.
struct VideoForward {
  VideoEmbedding embedding;
  ValueRef video_feature;  // 1 x 2 d_h
  ValueRef logits;         // 1 x K
};
VideoForward forward_video(Tape& t, const FrameFeatureSequence& seq,
                           const VideoGraph& graph, const ModelParams& params);

}  // namespace tvgd

#endif  // TVGD_DA_HPP
