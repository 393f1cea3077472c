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

#include "tvgd/da.hpp"

#include <cmath>
#include <string>

#include "tvgd/error.hpp"

namespace tvgd {

double DaConfig::effective_lambda(double progress) const {
  if (!grl_ramp) return grl_lambda;
  return grl_lambda * (2.0 / (1.0 + std::exp(-10.0 * progress)) - 1.0);
}

ValueRef mlp_forward(Tape& t, ValueRef x, const MlpParams& p,
                     const std::string& prefix) {
  auto h1 = t.leaky_relu(
      t.add_row(t.matmul(x, t.param(prefix + ".l1.w", p.l1.w)),
                t.param(prefix + ".l1.b", p.l1.b)),
      0.2);
  auto h2 = t.leaky_relu(
      t.add_row(t.matmul(h1, t.param(prefix + ".l2.w", p.l2.w)),
                t.param(prefix + ".l2.b", p.l2.b)),
      0.2);
  return t.add_row(t.matmul(h2, t.param(prefix + ".l3.w", p.l3.w)),
                   t.param(prefix + ".l3.b", p.l3.b));
}

ValueRef classify(Tape& t, ValueRef video_features, const MlpParams& p) {
  if (t.value(video_features).cols() != p.l1.w.rows()) {
    throw Error("classify: feature width " +
                std::to_string(t.value(video_features).cols()) +
                " != classifier input " + std::to_string(p.l1.w.rows()));
  }
  return mlp_forward(t, video_features, p, "cls");
}

ValueRef cdan_condition(Tape& t, ValueRef features, ValueRef predictions) {
  const Tensor2& g = t.value(predictions);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < g.cols(); ++c) {
      if (g.at(r, c) < 0.0) {
        throw Error("cdan_condition: negative probability in row " +
                    std::to_string(r));
      }
      sum += g.at(r, c);
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw Error("cdan_condition: row " + std::to_string(r) +
                  " does not sum to 1 (sum=" + std::to_string(sum) + ")");
    }
  }
  return t.outer_rows(features, predictions);
}

namespace {

// GRL wrapper honoring the test hook.
ValueRef reversed(Tape& t, ValueRef x, const DaConfig& cfg, double lambda) {
  return cfg.grl_enabled ? t.grl(x, lambda) : x;
}

// Fraction of rows the discriminator classifies correctly (source logit > 0,
// target logit <= 0).
double domain_accuracy(const Tensor2& src_logits, const Tensor2& tgt_logits) {
  std::size_t correct = 0;
  for (std::size_t r = 0; r < src_logits.rows(); ++r) {
    if (src_logits.at(r, 0) > 0.0) ++correct;
  }
  for (std::size_t r = 0; r < tgt_logits.rows(); ++r) {
    if (tgt_logits.at(r, 0) <= 0.0) ++correct;
  }
  return static_cast<double>(correct) /
         static_cast<double>(src_logits.rows() + tgt_logits.rows());
}

// -E_src log D(x) - E_tgt log(1 - D(x)) with D given as logits, plus the
// discriminator's domain accuracy.
struct LevelLoss {
  ValueRef loss;
  double acc;
};

LevelLoss adversarial_level(Tape& t, ValueRef src_in, ValueRef tgt_in,
                            const MlpParams& disc, const std::string& prefix,
                            const DaConfig& cfg, double lambda) {
  auto src_logit = mlp_forward(t, reversed(t, src_in, cfg, lambda), disc, prefix);
  auto tgt_logit = mlp_forward(t, reversed(t, tgt_in, cfg, lambda), disc, prefix);
  auto loss = t.add(t.bce_logits(src_logit, 1.0), t.bce_logits(tgt_logit, 0.0));
  return {loss, domain_accuracy(t.value(src_logit), t.value(tgt_logit))};
}

void check_batches(const Tensor2& src, const Tensor2& tgt, const char* what) {
  if (src.rows() == 0 || tgt.rows() == 0) {
    throw ValidationError(std::string("domain loss: empty ") + what +
                          " batch for an enabled discriminator level");
  }
}

}  // namespace

DomainLossResult dann_domain_loss(Tape& t, ValueRef frame_feats_src,
                                  ValueRef frame_feats_tgt,
                                  ValueRef video_feats_src,
                                  ValueRef video_feats_tgt,
                                  const ModelParams& params,
                                  const DaConfig& cfg, double progress) {
  const double lambda = cfg.effective_lambda(progress);
  DomainLossResult out;
  if (cfg.use_frame_disc) {
    check_batches(t.value(frame_feats_src), t.value(frame_feats_tgt), "frame");
    auto level = adversarial_level(t, frame_feats_src, frame_feats_tgt,
                                   params.disc_f, "df", cfg, lambda);
    out.l_df = level.loss;
    out.disc_acc_f = level.acc;
  }
  if (cfg.use_video_disc) {
    check_batches(t.value(video_feats_src), t.value(video_feats_tgt), "video");
    auto level = adversarial_level(t, video_feats_src, video_feats_tgt,
                                   params.disc_v, "dv", cfg, lambda);
    out.l_dv = level.loss;
    out.disc_acc_v = level.acc;
  }
  return out;
}

DomainLossResult cdan_domain_loss(
    Tape& t, ValueRef frame_feats_src, ValueRef frame_preds_src,
    ValueRef frame_feats_tgt, ValueRef frame_preds_tgt,
    ValueRef video_feats_src, ValueRef video_preds_src,
    ValueRef video_feats_tgt, ValueRef video_preds_tgt,
    const ModelParams& params, const DaConfig& cfg, double progress) {
  const double lambda = cfg.effective_lambda(progress);
  DomainLossResult out;
  if (cfg.use_frame_disc) {
    check_batches(t.value(frame_feats_src), t.value(frame_feats_tgt), "frame");
    auto level = adversarial_level(
        t, cdan_condition(t, frame_feats_src, frame_preds_src),
        cdan_condition(t, frame_feats_tgt, frame_preds_tgt), params.disc_f,
        "df", cfg, lambda);
    out.l_df = level.loss;
    out.disc_acc_f = level.acc;
  }
  if (cfg.use_video_disc) {
    check_batches(t.value(video_feats_src), t.value(video_feats_tgt), "video");
    auto level = adversarial_level(
        t, cdan_condition(t, video_feats_src, video_preds_src),
        cdan_condition(t, video_feats_tgt, video_preds_tgt), params.disc_v,
        "dv", cfg, lambda);
    out.l_dv = level.loss;
    out.disc_acc_v = level.acc;
  }
  return out;
}

namespace {

struct EncodedBatch {
  ValueRef frame_feats;  // sum(T_i) x d_h
  ValueRef video_feats;  // N x 2 d_h
};

EncodedBatch encode_batch(Tape& t, const std::vector<PreparedVideo>& videos,
                          const char* tag, const ModelParams& params) {
  std::vector<ValueRef> frame_parts;
  std::vector<ValueRef> video_parts;
  int i = 0;
  for (const auto& pv : videos) {
    const std::string name = std::string(tag) + std::to_string(i++) + ".z";
    auto z = t.input(name, pv.seq->frames);
    auto v0 = encode_frames(t, z, params.phi);
    auto emb = video_embed(t, v0, graph_structure(*pv.graph), params);
    frame_parts.push_back(v0);
    video_parts.push_back(emb.video_feature);
  }
  return {t.concat_rows(frame_parts), t.concat_rows(video_parts)};
}

}  // namespace

ObjectiveResult total_objective(Tape& t,
                                const std::vector<PreparedVideo>& source,
                                const std::vector<PreparedVideo>& target,
                                const ModelParams& params, const DaConfig& cfg,
                                double progress) {
  if (params.dims.backbone != cfg.backbone) {
    throw ValidationError("total_objective: params were sized for backbone '" +
                          std::string(backbone_name(params.dims.backbone)) +
                          "' but cfg asks for '" +
                          std::string(backbone_name(cfg.backbone)) + "'");
  }
  if (cfg.alpha < 0.0) throw ValidationError("total_objective: alpha < 0");
  // Disabling both discriminators is the source-only configuration.
  const bool domain_on =
      cfg.alpha > 0.0 && (cfg.use_frame_disc || cfg.use_video_disc);
  if (source.empty()) {
    throw ValidationError("total_objective: empty source batch");
  }
  if (domain_on && target.empty()) {
    throw ValidationError("total_objective: empty target batch");
  }

  std::vector<int> labels;
  for (const auto& pv : source) {
    if (pv.seq->label < 0) {
      throw ValidationError("total_objective: unlabeled source video '" +
                            pv.seq->video_id + "'");
    }
    labels.push_back(pv.seq->label);
  }

  ObjectiveResult out;
  auto src = encode_batch(t, source, "src", params);

  // Classification on the graph feature H (the paper routes C_s through the
  // graph module; Eq. 7's notation elides G).
  auto src_logits = classify(t, src.video_feats, params.classifier);
  auto l_c = t.cross_entropy_logits(src_logits, labels);
  ValueRef loss = l_c;

  const Tensor2& logit_vals = t.value(src_logits);
  out.metrics.src_count = static_cast<int>(logit_vals.rows());
  for (std::size_t r = 0; r < logit_vals.rows(); ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < logit_vals.cols(); ++c) {
      if (logit_vals.at(r, c) > logit_vals.at(r, best)) best = c;
    }
    if (static_cast<int>(best) == labels[r]) ++out.metrics.src_correct;
  }

  if (domain_on) {
    auto tgt = encode_batch(t, target, "tgt", params);
    DomainLossResult dl;
    if (cfg.backbone == Backbone::kDann) {
      dl = dann_domain_loss(t, src.frame_feats, tgt.frame_feats,
                            src.video_feats, tgt.video_feats, params, cfg,
                            progress);
    } else {
      // CDAN conditions on the classifier/frame-head predictions.
      auto tgt_logits = classify(t, tgt.video_feats, params.classifier);
      auto video_preds_src = t.softmax_rows(src_logits);
      auto video_preds_tgt = t.softmax_rows(tgt_logits);
      auto frame_logits_src =
          mlp_forward(t, src.frame_feats, params.frame_head, "fhead");
      auto frame_logits_tgt =
          mlp_forward(t, tgt.frame_feats, params.frame_head, "fhead");
      auto frame_preds_src = t.softmax_rows(frame_logits_src);
      auto frame_preds_tgt = t.softmax_rows(frame_logits_tgt);

      // Auxiliary per-frame CE: video label broadcast to its frames.
      if (cfg.frame_head_ce_weight > 0.0) {
        std::vector<int> frame_labels;
        for (std::size_t i = 0; i < source.size(); ++i) {
          for (std::size_t f = 0; f < source[i].seq->frame_count(); ++f) {
            frame_labels.push_back(labels[i]);
          }
        }
        loss = t.add(loss, t.scale_const(t.cross_entropy_logits(
                                             frame_logits_src, frame_labels),
                                         cfg.frame_head_ce_weight));
      }

      dl = cdan_domain_loss(t, src.frame_feats, frame_preds_src,
                            tgt.frame_feats, frame_preds_tgt, src.video_feats,
                            video_preds_src, tgt.video_feats, video_preds_tgt,
                            params, cfg, progress);
    }
    ValueRef l_d;
    if (dl.l_df.valid()) {
      l_d = dl.l_df;
      out.metrics.l_df = t.value(dl.l_df).at(0, 0);
      out.metrics.disc_acc_f = dl.disc_acc_f;
    }
    if (dl.l_dv.valid()) {
      l_d = l_d.valid() ? t.add(l_d, dl.l_dv) : dl.l_dv;
      out.metrics.l_dv = t.value(dl.l_dv).at(0, 0);
      out.metrics.disc_acc_v = dl.disc_acc_v;
    }
    loss = t.add(loss, t.scale_const(l_d, cfg.alpha));
  }

  out.loss = loss;
  out.metrics.l_c = t.value(l_c).at(0, 0);
  if (!t.value(loss).all_finite()) {
    throw Error("total_objective: non-finite loss");
  }
  return out;
}

VideoForward forward_video(Tape& t, const FrameFeatureSequence& seq,
                           const VideoGraph& graph, const ModelParams& params) {
  VideoForward out;
  auto z = t.input("z", seq.frames);
  auto v0 = encode_frames(t, z, params.phi);
  out.embedding = video_embed(t, v0, graph_structure(graph), params);
  out.video_feature = out.embedding.video_feature;
  out.logits = classify(t, out.video_feature, params.classifier);
  return out;
}

}  // namespace tvgd
