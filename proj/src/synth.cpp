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

#include "tvgd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tvgd/error.hpp"
#include "tvgd/rng.hpp"

namespace tvgd {

namespace {

constexpr int kLatentDim = 8;
constexpr int kAnchors = 5;

// Stream tags for Rng::child
enum : std::uint64_t {
  kStreamClassAnchors = 1,
  kStreamBackground = 2,
  kStreamTransform = 3,
  kStreamLength = 4,
  kStreamOffsets = 5,
  kStreamNoise = 6,
};

struct Trajectory {
  // kAnchors x kLatentDim anchor points, linearly interpolated over [0, 1]
  std::vector<double> anchors;

  void eval(double u, double* out) const {
    const double pos = std::clamp(u, 0.0, 1.0) * (kAnchors - 1);
    const int lo = std::min(static_cast<int>(pos), kAnchors - 2);
    const double w = pos - lo;
    const double* a = anchors.data() + lo * kLatentDim;
    const double* b = a + kLatentDim;
    for (int j = 0; j < kLatentDim; ++j) out[j] = (1.0 - w) * a[j] + w * b[j];
  }
};

Trajectory random_trajectory(Rng rng, double scale) {
  Trajectory t;
  t.anchors.resize(static_cast<std::size_t>(kAnchors) * kLatentDim);
  for (auto& a : t.anchors) a = scale * rng.normal();
  return t;
}

}  // namespace

SynthData gen_synthetic(const SynthConfig& cfg) {
  if (cfg.n_classes < 1 || cfg.videos_per_class < 1 || cfg.feature_dim < 1) {
    throw ValidationError("gen_synthetic: counts must be >= 1");
  }
  if (cfg.t_min < 2 || cfg.t_max < cfg.t_min) {
    throw ValidationError("gen_synthetic: need 2 <= t_min <= t_max");
  }
  if (cfg.transform_strength < 0 || cfg.noise < 0 ||
      cfg.source_offset_frac < 0 || cfg.target_offset_frac < 0 ||
      cfg.source_offset_frac >= 0.5 || cfg.target_offset_frac >= 0.5) {
    throw ValidationError(
        "gen_synthetic: strengths must be >= 0 and offset fractions < 0.5");
  }

  std::vector<Trajectory> class_traj;
  for (int k = 0; k < cfg.n_classes; ++k) {
    class_traj.push_back(random_trajectory(
        Rng::child(cfg.seed, {kStreamClassAnchors, static_cast<std::uint64_t>(k)}),
        1.0));
  }
  const Trajectory background =
      random_trajectory(Rng::child(cfg.seed, {kStreamBackground}), 1.0);

  // Domain maps: target = source + strength * (P . source) with P a random
  // latent-space mixing matrix. Composing in latent space keeps the shift
  // inside the feature subspace the source data spans; a purely additive
  // random map would land mostly orthogonal to it and be invisible to any
  // model fit on source features.
  const std::size_t map_len =
      static_cast<std::size_t>(kLatentDim) * static_cast<std::size_t>(cfg.feature_dim);
  std::vector<double> map_src(map_len), map_tgt(map_len);
  {
    Rng mr = Rng::child(cfg.seed, {kStreamTransform, 0});
    for (auto& v : map_src) v = mr.normal() / std::sqrt(double(kLatentDim));
    Rng dr = Rng::child(cfg.seed, {kStreamTransform, 1});
    std::vector<double> mix(static_cast<std::size_t>(kLatentDim) * kLatentDim);
    for (auto& v : mix) v = dr.normal() / std::sqrt(double(kLatentDim));
    for (int r = 0; r < kLatentDim; ++r) {
      for (int c = 0; c < cfg.feature_dim; ++c) {
        double acc = 0.0;
        for (int j = 0; j < kLatentDim; ++j) {
          acc += mix[static_cast<std::size_t>(r) * kLatentDim +
                     static_cast<std::size_t>(j)] *
                 map_src[static_cast<std::size_t>(j) *
                             static_cast<std::size_t>(cfg.feature_dim) +
                         static_cast<std::size_t>(c)];
        }
        const std::size_t at = static_cast<std::size_t>(r) *
                                   static_cast<std::size_t>(cfg.feature_dim) +
                               static_cast<std::size_t>(c);
        map_tgt[at] = map_src[at] + cfg.transform_strength * acc;
      }
    }
  }

  SynthData out;
  double latent[kLatentDim];
  for (int domain_idx = 0; domain_idx < 2; ++domain_idx) {
    const bool is_target = domain_idx == 1;
    const double offset_frac =
        is_target ? cfg.target_offset_frac : cfg.source_offset_frac;
    const std::vector<double>& map = is_target ? map_tgt : map_src;
    Dataset& ds = is_target ? out.target : out.source;
    for (int k = 0; k < cfg.n_classes; ++k) {
      for (int i = 0; i < cfg.videos_per_class; ++i) {
        const auto ku = static_cast<std::uint64_t>(k);
        const auto iu = static_cast<std::uint64_t>(i);
        Rng len_rng = Rng::child(cfg.seed, {kStreamLength, ku, iu});
        Rng off_rng = Rng::child(cfg.seed, {kStreamOffsets, ku, iu});
        Rng noise_rng = Rng::child(cfg.seed, {kStreamNoise, ku, iu});

        const int t = static_cast<int>(len_rng.uniform_int(cfg.t_min, cfg.t_max));
        const double pre = off_rng.uniform() * offset_frac;
        const double post = off_rng.uniform() * offset_frac;

        FrameFeatureSequence seq;
        seq.video_id = std::string(is_target ? "t" : "s") + "_c" +
                       std::to_string(k) + "_v" + std::to_string(i);
        seq.domain = is_target ? Domain::kTarget : Domain::kSource;
        seq.label = k;
        seq.frames =
            Tensor2(static_cast<std::size_t>(t), static_cast<std::size_t>(cfg.feature_dim));
        for (int f = 0; f < t; ++f) {
          const double u = static_cast<double>(f) / static_cast<double>(t - 1);
          if (u < pre) {
            background.eval(u / std::max(pre, 1e-9), latent);
          } else if (u > 1.0 - post) {
            background.eval((u - (1.0 - post)) / std::max(post, 1e-9), latent);
          } else {
            const double span = std::max(1.0 - pre - post, 1e-9);
            class_traj[static_cast<std::size_t>(k)].eval((u - pre) / span, latent);
          }
          double* row = seq.frames.row(static_cast<std::size_t>(f));
          for (int c = 0; c < cfg.feature_dim; ++c) {
            double acc = 0.0;
            for (int j = 0; j < kLatentDim; ++j) {
              acc += latent[j] *
                     map[static_cast<std::size_t>(j) *
                             static_cast<std::size_t>(cfg.feature_dim) +
                         static_cast<std::size_t>(c)];
            }
            row[static_cast<std::size_t>(c)] = acc + cfg.noise * noise_rng.normal();
          }
        }
        ds.push_back(std::move(seq));
      }
    }
  }
  return out;
}

}  // namespace tvgd
