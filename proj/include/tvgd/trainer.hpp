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

#ifndef TVGD_TRAINER_HPP
#define TVGD_TRAINER_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tvgd/checkpoint.hpp"
#include "tvgd/da.hpp"
#include "tvgd/model.hpp"
#include "tvgd/vgf.hpp"

namespace tvgd {

/// End-to-end training configuration. Defaults are the paper setup: batch
/// 32, 100 epochs, 40 sampled frames, k = 5 similarity edges, SGD at lr
/// 0.001 with momentum 0.9 and weight decay 1e-4 (no lr decay — only the
/// initial rate is specified).
struct TrainConfig {
  int batch_size = 32;  // split evenly between source and target
  int epochs = 100;
  int frames = 40;
  int k_similarity = 5;
  double lr = 0.001;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  Backbone backbone = Backbone::kCdan;
  std::uint64_t seed = 1;

  int d_h = 256;
  int phi_hidden = 512;
  int cls_hidden1 = 256;
  int cls_hidden2 = 128;
  int disc_hidden1 = 256;
  int disc_hidden2 = 128;

  double alpha = 1.0;
  double grl_lambda = 1.0;
  bool grl_ramp = false;
  double frame_head_ce_weight = 0.1;
  double holdout_frac = 0.1;  // source split held out for monitoring

  // ablations
  bool disable_similarity_edges = false;  // build graphs with k = 0
  bool disable_frame_disc = false;
  bool disable_video_disc = false;

  void validate() const;
  std::map<std::string, std::string> to_map() const;
  static TrainConfig from_map(const std::map<std::string, std::string>& m);

  int effective_k() const { return disable_similarity_edges ? 0 : k_similarity; }
  DaConfig da_config() const;
};

struct MetricRow {
  int epoch = 0;
  int step = 0;  // -1 marks the per-epoch summary row
  double l_c = 0.0;
  double l_df = 0.0;
  double l_dv = 0.0;
  double disc_acc_f = -1.0;
  double disc_acc_v = -1.0;
  double src_acc = -1.0;  // batch accuracy per step, holdout on summary rows
  double tgt_acc = -1.0;  // only on the final summary row, when available

  std::string csv_line() const;
  static const char* csv_header();
};

std::string metrics_to_csv(const std::vector<MetricRow>& rows);

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<MetricRow> history;
  double holdout_accuracy = -1.0;
  double target_accuracy = -1.0;  // -1 when the target set is unlabeled
};

/// Trains with per-epoch reshuffles of both domains, equal source/target
/// mini-batch halves (target cycled when smaller), and one SGD step per
/// batch. Deterministic for a fixed seed. `progress`, when given, receives
/// one line per epoch.
TrainResult train(const Dataset& source, const Dataset& target,
                  const TrainConfig& cfg, std::ostream* progress = nullptr);

struct EvalResult {
  double accuracy = 0.0;
  int count = 0;
  std::vector<std::vector<int>> confusion;  // [true][predicted]
};

/// Top-1 accuracy and confusion counts under a trained checkpoint.
/// Every video in `data` must carry a label.
EvalResult evaluate(const Checkpoint& ckpt, const Dataset& data);

/// One row per video: video_id, domain, label, then the 2 d_h entries of H.
void export_embeddings(const Checkpoint& ckpt, const Dataset& data,
                       std::ostream& out);

/// Attention weights per layer and directed edge:
/// video_id, layer, src_node, dst_node, weight.
void export_attention(const Checkpoint& ckpt, const Dataset& data,
                      std::ostream& out);

/// Rebuilds the model tensors recorded in a checkpoint.
ModelParams params_from_checkpoint(const Checkpoint& ckpt);

}  // namespace tvgd

#endif  // TVGD_TRAINER_HPP
