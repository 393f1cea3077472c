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

#ifndef TVGD_SYNTH_HPP
#define TVGD_SYNTH_HPP

#include <cstdint>

#include "tvgd/vgf.hpp"

namespace tvgd {

/// Deterministic domain-shifted video-feature generator.
///
/// Each class has a latent trajectory (piecewise-linear spline through
/// seeded anchors, shared across domains); a video scans it over a middle
/// activity window, padded on both sides by a class-independent background
/// trajectory. Features are the latent path through a domain-specific
/// linear map (target = source + transform_strength * delta) plus Gaussian
/// noise. Target background offsets draw from a wider range, so the shift
/// is both feature-space and temporal.
///
/// The length/offset/noise streams are keyed by (seed, class, index) only,
/// never by domain: with transform_strength 0 and equal offset fractions
/// the two domains generate byte-identical videos.
struct SynthConfig {
  int n_classes = 6;
  int videos_per_class = 40;  // per domain
  int feature_dim = 64;
  int t_min = 22;
  int t_max = 120;
  double transform_strength = 0.9;   // feature-space shift
  double source_offset_frac = 0.25;  // max background fraction per side
  double target_offset_frac = 0.45;
  double noise = 0.05;
  std::uint64_t seed = 1;
};

struct SynthData {
  Dataset source;
  Dataset target;
};

SynthData gen_synthetic(const SynthConfig& cfg);

}  // namespace tvgd

#endif  // TVGD_SYNTH_HPP
