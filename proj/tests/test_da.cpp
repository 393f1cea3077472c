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

#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "tvgd/da.hpp"
#include "tvgd/error.hpp"
#include "tvgd/rng.hpp"
#include "tvgd/video_graph.hpp"

using tvgd::Backbone;
using tvgd::build_video_graph;
using tvgd::DaConfig;
using tvgd::FrameFeatureSequence;
using tvgd::ModelDims;
using tvgd::ModelParams;
using tvgd::PreparedVideo;
using tvgd::Rng;
using tvgd::Tape;
using tvgd::Tensor2;
using tvgd::ValueRef;

namespace {

ModelDims tiny_dims(Backbone backbone) {
  ModelDims d;
  d.d_in = 4;
  d.phi_hidden = 6;
  d.d_h = 4;
  d.n_classes = 3;
  d.cls_hidden1 = 5;
  d.cls_hidden2 = 4;
  d.disc_hidden1 = 5;
  d.disc_hidden2 = 4;
  d.backbone = backbone;
  return d;
}

void zero_mlp(tvgd::MlpParams& p) {
  p.l1.w.zero();
  p.l1.b.zero();
  p.l2.w.zero();
  p.l2.b.zero();
  p.l3.w.zero();
  p.l3.b.zero();
}

FrameFeatureSequence random_video(Rng& rng, std::size_t t, std::size_t d,
                                  int label, tvgd::Domain domain,
                                  const std::string& id) {
  FrameFeatureSequence s;
  s.video_id = id;
  s.domain = domain;
  s.label = label;
  s.frames = Tensor2(t, d);
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    s.frames.data()[i] = rng.uniform(-1, 1);
  }
  return s;
}

struct Batch {
  std::vector<FrameFeatureSequence> seqs;
  std::vector<tvgd::VideoGraph> graphs;
  std::vector<PreparedVideo> prepared;
};

Batch make_batch(Rng& rng, int count, std::size_t t, std::size_t d,
                 tvgd::Domain domain, bool labeled) {
  Batch b;
  b.seqs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    b.seqs.push_back(random_video(rng, t, d, labeled ? i % 3 : -1, domain,
                                  (domain == tvgd::Domain::kSource ? "s" : "t") +
                                      std::to_string(i)));
  }
  for (auto& s : b.seqs) b.graphs.push_back(build_video_graph(s, 2));
  for (std::size_t i = 0; i < b.seqs.size(); ++i) {
    b.prepared.push_back({&b.seqs[i], &b.graphs[i]});
  }
  return b;
}

}  // namespace

TEST_CASE("classify: zero weights give uniform logits and ln K loss") {
  ModelParams p = ModelParams::init(tiny_dims(Backbone::kDann), 1);
  zero_mlp(p.classifier);
  Tape t;
  auto h = t.constant(Tensor2(2, 8));
  auto logits = tvgd::classify(t, h, p.classifier);
  auto loss = t.cross_entropy_logits(logits, {0, 2});
  CHECK(t.value(loss).at(0, 0) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
}

TEST_CASE("classify: saturated logits give near-zero loss") {
  Tape t;
  auto logits = t.constant(Tensor2::from_rows({{40.0, 0.0, 0.0}}));
  auto loss = t.cross_entropy_logits(logits, {0});
  CHECK(t.value(loss).at(0, 0) < 0.01);
}

TEST_CASE("classify matches a dense recomputation oracle") {
  Rng rng(61);
  ModelParams p = ModelParams::init(tiny_dims(Backbone::kDann), 2);
  Tensor2 h(2, 8);
  for (std::size_t i = 0; i < h.size(); ++i) h.data()[i] = rng.uniform(-1, 1);
  Tape t;
  auto logits = tvgd::classify(t, t.constant(h), p.classifier);

  auto leaky = [](double x) { return x > 0.0 ? x : 0.2 * x; };
  for (std::size_t r = 0; r < 2; ++r) {
    std::vector<double> cur(h.row(r), h.row(r) + h.cols());
    const tvgd::AffineParams* layers[3] = {&p.classifier.l1, &p.classifier.l2,
                                           &p.classifier.l3};
    for (int l = 0; l < 3; ++l) {
      std::vector<double> next(layers[l]->w.cols(), 0.0);
      for (std::size_t o = 0; o < next.size(); ++o) {
        double acc = layers[l]->b.at(0, o);
        for (std::size_t i = 0; i < cur.size(); ++i) {
          acc += cur[i] * layers[l]->w.at(i, o);
        }
        next[o] = l < 2 ? leaky(acc) : acc;
      }
      cur = std::move(next);
    }
    for (std::size_t c = 0; c < cur.size(); ++c) {
      CHECK(t.value(logits).at(r, c) == doctest::Approx(cur[c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("cdan_condition: one-hot prediction selects a block") {
  Tape t;
  auto f = t.constant(Tensor2::from_rows({{2.0, 4.0}}));
  auto g1 = t.constant(Tensor2::from_rows({{1.0, 0.0}}));
  auto out = tvgd::cdan_condition(t, f, g1);
  REQUIRE(t.value(out).cols() == 4);
  CHECK(t.value(out).at(0, 0) == 2.0);
  CHECK(t.value(out).at(0, 1) == 0.0);
  CHECK(t.value(out).at(0, 2) == 4.0);
  CHECK(t.value(out).at(0, 3) == 0.0);

  auto g2 = t.constant(Tensor2::from_rows({{0.5, 0.5}}));
  auto out2 = tvgd::cdan_condition(t, f, g2);
  CHECK(t.value(out2).at(0, 0) == 1.0);
  CHECK(t.value(out2).at(0, 1) == 1.0);
  CHECK(t.value(out2).at(0, 2) == 2.0);
  CHECK(t.value(out2).at(0, 3) == 2.0);

  auto bad = t.constant(Tensor2::from_rows({{0.9, 0.3}}));
  CHECK_THROWS_WITH_AS(tvgd::cdan_condition(t, f, bad),
                       doctest::Contains("sum to 1"), tvgd::Error);
}

TEST_CASE("cdan_condition: flattened length and sum identity") {
  Rng rng(62);
  Tape t;
  Tensor2 f(1, 512), g(1, 12);
  double fsum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.data()[i] = rng.uniform(-1, 1);
    fsum += f.data()[i];
  }
  double gsum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] = rng.uniform(0.1, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) gsum += g.data()[i];
  for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] /= gsum;
  auto out = tvgd::cdan_condition(t, t.constant(f), t.constant(g));
  REQUIRE(t.value(out).cols() == 6144);
  double flat_sum = 0.0;
  for (std::size_t i = 0; i < t.value(out).size(); ++i) {
    flat_sum += t.value(out).data()[i];
  }
  CHECK(flat_sum == doctest::Approx(fsum).epsilon(1e-9));
}

TEST_CASE("uniform discriminator yields exactly 2 ln 2 per level") {
  ModelParams p = ModelParams::init(tiny_dims(Backbone::kDann), 3);
  zero_mlp(p.disc_f);
  zero_mlp(p.disc_v);
  DaConfig cfg;
  Tape t;
  Rng rng(63);
  Tensor2 fs(5, 4), ft(7, 4), vs(2, 8), vt(3, 8);
  for (auto* m : {&fs, &ft, &vs, &vt}) {
    for (std::size_t i = 0; i < m->size(); ++i) m->data()[i] = rng.uniform(-1, 1);
  }
  auto res = tvgd::dann_domain_loss(t, t.constant(fs), t.constant(ft),
                                    t.constant(vs), t.constant(vt), p, cfg, 0.0);
  const double two_ln2 = 2.0 * std::log(2.0);
  CHECK(t.value(res.l_df).at(0, 0) == doctest::Approx(two_ln2).epsilon(1e-15));
  CHECK(t.value(res.l_dv).at(0, 0) == doctest::Approx(two_ln2).epsilon(1e-15));
}

TEST_CASE("saturated discriminator drives the loss to zero") {
  ModelDims dims = tiny_dims(Backbone::kDann);
  dims.d_h = 1;
  dims.disc_hidden1 = 1;
  dims.disc_hidden2 = 1;
  ModelParams p = ModelParams::init(dims, 4);
  // identity-ish chain: logit(x) = x for x > 0, 0.04 x for x < 0
  p.disc_f.l1.w = Tensor2::scalar(1.0);
  p.disc_f.l1.b.zero();
  p.disc_f.l2.w = Tensor2::scalar(1.0);
  p.disc_f.l2.b.zero();
  p.disc_f.l3.w = Tensor2::scalar(1.0);
  p.disc_f.l3.b.zero();
  DaConfig cfg;
  cfg.use_video_disc = false;
  Tape t;
  auto fs = t.constant(Tensor2::from_rows({{40.0}, {45.0}}));
  auto ft = t.constant(Tensor2::from_rows({{-1000.0}, {-1200.0}}));
  auto res = tvgd::dann_domain_loss(t, fs, ft, fs, ft, p, cfg, 0.0);
  CHECK(t.value(res.l_df).at(0, 0) < 1e-10);
  CHECK(res.disc_acc_f == 1.0);
}

TEST_CASE("cdan uniform discriminator also gives 2 ln 2 per level") {
  ModelParams p = ModelParams::init(tiny_dims(Backbone::kCdan), 5);
  zero_mlp(p.disc_f);
  zero_mlp(p.disc_v);
  DaConfig cfg;
  cfg.backbone = Backbone::kCdan;
  Rng rng(64);
  Tape t;
  Tensor2 fs(4, 4), ft(3, 4), vs(2, 8), vt(2, 8);
  for (auto* m : {&fs, &ft, &vs, &vt}) {
    for (std::size_t i = 0; i < m->size(); ++i) m->data()[i] = rng.uniform(-1, 1);
  }
  auto uniform_preds = [&](std::size_t rows) {
    Tensor2 g(rows, 3);
    g.fill(1.0 / 3.0);
    return g;
  };
  auto res = tvgd::cdan_domain_loss(
      t, t.constant(fs), t.constant(uniform_preds(4)), t.constant(ft),
      t.constant(uniform_preds(3)), t.constant(vs), t.constant(uniform_preds(2)),
      t.constant(vt), t.constant(uniform_preds(2)), p, cfg, 0.0);
  const double two_ln2 = 2.0 * std::log(2.0);
  CHECK(t.value(res.l_df).at(0, 0) == doctest::Approx(two_ln2).epsilon(1e-15));
  CHECK(t.value(res.l_dv).at(0, 0) == doctest::Approx(two_ln2).epsilon(1e-15));
}

TEST_CASE("grl algebra: encoder grads scale by -lambda, disc grads unchanged") {
  Rng rng(65);
  for (Backbone backbone : {Backbone::kDann, Backbone::kCdan}) {
    for (double lambda : {1.0, 0.65}) {
      ModelParams p = ModelParams::init(tiny_dims(backbone), 6);
      Batch src = make_batch(rng, 2, 5, 4, tvgd::Domain::kSource, true);
      Batch tgt = make_batch(rng, 2, 6, 4, tvgd::Domain::kTarget, false);

      // Domain loss only, so the -lambda relation is exact.
      auto domain_grads = [&](bool grl_on) {
        Tape t;
        DaConfig cfg;
        cfg.backbone = backbone;
        cfg.grl_enabled = grl_on;
        cfg.grl_lambda = lambda;
        auto enc = [&](const Batch& b, const char* tag) {
          std::vector<ValueRef> fparts, vparts;
          int i = 0;
          for (const auto& pv : b.prepared) {
            auto z = t.input(std::string(tag) + std::to_string(i++), pv.seq->frames);
            auto v0 = tvgd::encode_frames(t, z, p.phi);
            auto emb = tvgd::video_embed(t, v0, tvgd::graph_structure(*pv.graph), p);
            fparts.push_back(v0);
            vparts.push_back(emb.video_feature);
          }
          return std::pair{t.concat_rows(fparts), t.concat_rows(vparts)};
        };
        auto [fs, vs] = enc(src, "s");
        auto [ft, vt] = enc(tgt, "t");
        tvgd::DomainLossResult dl;
        if (backbone == Backbone::kDann) {
          dl = tvgd::dann_domain_loss(t, fs, ft, vs, vt, p, cfg, 0.0);
        } else {
          auto preds = [&](ValueRef v) {
            return t.softmax_rows(tvgd::classify(t, v, p.classifier));
          };
          auto fpreds = [&](ValueRef f) {
            return t.softmax_rows(tvgd::mlp_forward(t, f, p.frame_head, "fhead"));
          };
          dl = tvgd::cdan_domain_loss(t, fs, fpreds(fs), ft, fpreds(ft), vs,
                                      preds(vs), vt, preds(vt), p, cfg, 0.0);
        }
        t.backward(t.add(dl.l_df, dl.l_dv));
        return t.param_grads();
      };

      auto with_grl = domain_grads(true);
      auto without = domain_grads(false);
      for (const auto& [name, g_on] : with_grl) {
        const Tensor2& g_off = without.at(name);
        const bool disc_side = name.rfind("df", 0) == 0 || name.rfind("dv", 0) == 0;
        for (std::size_t i = 0; i < g_on.size(); ++i) {
          if (disc_side) {
            CHECK(g_on.data()[i] == g_off.data()[i]);
          } else {
            CHECK(std::abs(g_on.data()[i] - (-lambda) * g_off.data()[i]) <=
                  1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("total_objective: alpha 0 is pure source classification") {
  Rng rng(66);
  ModelParams p = ModelParams::init(tiny_dims(Backbone::kDann), 7);
  Batch src = make_batch(rng, 3, 5, 4, tvgd::Domain::kSource, true);
  Batch tgt1 = make_batch(rng, 3, 5, 4, tvgd::Domain::kTarget, false);
  Batch tgt2 = make_batch(rng, 3, 5, 4, tvgd::Domain::kTarget, false);
  DaConfig cfg;
  cfg.alpha = 0.0;

  auto grads_with_target = [&](const Batch& tgt) {
    Tape t;
    auto res = tvgd::total_objective(t, src.prepared, tgt.prepared, p, cfg, 0.0);
    CHECK(res.metrics.l_c == t.value(res.loss).at(0, 0));
    t.backward(res.loss);
    return t.param_grads();
  };
  auto g1 = grads_with_target(tgt1);
  auto g2 = grads_with_target(tgt2);
  for (const auto& [name, g] : g1) {
    CHECK(g == g2.at(name));  // target batch is irrelevant at alpha = 0
  }
}

TEST_CASE("total_objective: metrics are populated and loss composes") {
  Rng rng(67);
  for (Backbone backbone : {Backbone::kDann, Backbone::kCdan}) {
    ModelParams p = ModelParams::init(tiny_dims(backbone), 8);
    Batch src = make_batch(rng, 3, 6, 4, tvgd::Domain::kSource, true);
    Batch tgt = make_batch(rng, 2, 5, 4, tvgd::Domain::kTarget, false);
    DaConfig cfg;
    cfg.backbone = backbone;
    cfg.alpha = 0.5;
    Tape t;
    auto res = tvgd::total_objective(t, src.prepared, tgt.prepared, p, cfg, 0.2);
    CHECK(res.metrics.src_count == 3);
    CHECK(res.metrics.l_df > 0.0);
    CHECK(res.metrics.l_dv > 0.0);
    CHECK(res.metrics.disc_acc_f >= 0.0);
    CHECK(res.metrics.disc_acc_v <= 1.0);
    if (backbone == Backbone::kDann) {
      CHECK(t.value(res.loss).at(0, 0) ==
            doctest::Approx(res.metrics.l_c +
                            0.5 * (res.metrics.l_df + res.metrics.l_dv)));
    }
    t.backward(res.loss);  // must not throw
  }
}

TEST_CASE("total_objective rejects bad batches") {
  Rng rng(68);
  ModelParams p = ModelParams::init(tiny_dims(Backbone::kDann), 9);
  Batch src = make_batch(rng, 2, 5, 4, tvgd::Domain::kSource, true);
  Batch tgt = make_batch(rng, 2, 5, 4, tvgd::Domain::kTarget, false);
  DaConfig cfg;
  Tape t;
  CHECK_THROWS_AS(tvgd::total_objective(t, {}, tgt.prepared, p, cfg, 0.0),
                  tvgd::ValidationError);
  Tape t2;
  CHECK_THROWS_AS(tvgd::total_objective(t2, src.prepared, {}, p, cfg, 0.0),
                  tvgd::ValidationError);
  Batch unlabeled = make_batch(rng, 2, 5, 4, tvgd::Domain::kSource, false);
  Tape t3;
  CHECK_THROWS_AS(
      tvgd::total_objective(t3, unlabeled.prepared, tgt.prepared, p, cfg, 0.0),
      tvgd::ValidationError);
}

TEST_CASE("disabling both discriminators reduces to source-only") {
  Rng rng(70);
  ModelParams p = ModelParams::init(tiny_dims(Backbone::kDann), 11);
  Batch src = make_batch(rng, 2, 5, 4, tvgd::Domain::kSource, true);
  Batch tgt = make_batch(rng, 2, 5, 4, tvgd::Domain::kTarget, false);
  DaConfig cfg;
  cfg.use_frame_disc = false;
  cfg.use_video_disc = false;
  Tape t;
  auto res = tvgd::total_objective(t, src.prepared, tgt.prepared, p, cfg, 0.0);
  CHECK(t.value(res.loss).at(0, 0) == res.metrics.l_c);
  CHECK(res.metrics.disc_acc_f == -1.0);
  CHECK(res.metrics.disc_acc_v == -1.0);
}

TEST_CASE("frame-level examples count every frame of every video") {
  Rng rng(69);
  ModelParams p = ModelParams::init(tiny_dims(Backbone::kDann), 10);
  Batch src = make_batch(rng, 2, 5, 4, tvgd::Domain::kSource, true);
  Tape t;
  std::vector<ValueRef> parts;
  int i = 0;
  for (const auto& pv : src.prepared) {
    auto z = t.input("z" + std::to_string(i++), pv.seq->frames);
    parts.push_back(tvgd::encode_frames(t, z, p.phi));
  }
  auto stacked = t.concat_rows(parts);
  CHECK(t.value(stacked).rows() == 10);  // 2 videos x 5 frames
}

TEST_CASE("lambda ramp follows 2/(1+exp(-10 p)) - 1") {
  DaConfig cfg;
  cfg.grl_ramp = true;
  cfg.grl_lambda = 1.0;
  CHECK(cfg.effective_lambda(0.0) == doctest::Approx(0.0));
  CHECK(cfg.effective_lambda(1.0) ==
        doctest::Approx(2.0 / (1.0 + std::exp(-10.0)) - 1.0));
  cfg.grl_ramp = false;
  CHECK(cfg.effective_lambda(0.37) == 1.0);
}
