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

#include "tvgd/model.hpp"

#include <cmath>

#include "tvgd/error.hpp"
#include "tvgd/rng.hpp"

namespace tvgd {

const char* backbone_name(Backbone b) {
  return b == Backbone::kCdan ? "cdan" : "dann";
}

Backbone backbone_from_name(const std::string& name) {
  if (name == "dann" || name == "DANN") return Backbone::kDann;
  if (name == "cdan" || name == "CDAN") return Backbone::kCdan;
  throw ValidationError("unknown backbone '" + name + "' (expected dann|cdan)");
}

namespace {

Tensor2 glorot(Rng& rng, std::size_t fan_in, std::size_t fan_out,
               std::size_t rows, std::size_t cols) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor2 t(rows, cols);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t.data()[i] = rng.uniform(-limit, limit);
  }
  return t;
}

AffineParams affine(Rng& rng, int in, int out) {
  AffineParams p;
  p.w = glorot(rng, static_cast<std::size_t>(in), static_cast<std::size_t>(out),
               static_cast<std::size_t>(in), static_cast<std::size_t>(out));
  p.b = Tensor2(1, static_cast<std::size_t>(out));
  return p;
}

MlpParams mlp(Rng& rng, int in, int h1, int h2, int out) {
  MlpParams p;
  p.l1 = affine(rng, in, h1);
  p.l2 = affine(rng, h1, h2);
  p.l3 = affine(rng, h2, out);
  return p;
}

}  // namespace

ModelParams ModelParams::init(const ModelDims& dims, std::uint64_t seed) {
  if (dims.d_in < 1 || dims.phi_hidden < 1 || dims.d_h < 1 ||
      dims.n_classes < 1 || dims.cls_hidden1 < 1 || dims.cls_hidden2 < 1 ||
      dims.disc_hidden1 < 1 || dims.disc_hidden2 < 1) {
    throw ValidationError("ModelParams::init: all widths must be >= 1");
  }
  Rng rng = Rng::child(seed, {0x7061726d73ULL});  // independent of data streams
  ModelParams p;
  p.dims = dims;
  p.phi.l1 = affine(rng, dims.d_in, dims.phi_hidden);
  p.phi.l2 = affine(rng, dims.phi_hidden, dims.d_h);
  for (int l = 0; l < 3; ++l) {
    auto& g = p.gat[static_cast<std::size_t>(l)];
    g.w = glorot(rng, static_cast<std::size_t>(dims.d_h),
                 static_cast<std::size_t>(dims.d_h),
                 static_cast<std::size_t>(dims.d_h),
                 static_cast<std::size_t>(dims.d_h));
    g.a_dst = glorot(rng, static_cast<std::size_t>(2 * dims.d_h), 1,
                     static_cast<std::size_t>(dims.d_h), 1);
    g.a_src = glorot(rng, static_cast<std::size_t>(2 * dims.d_h), 1,
                     static_cast<std::size_t>(dims.d_h), 1);
    auto& ep = p.pool[static_cast<std::size_t>(l)];
    ep.w_dst = glorot(rng, static_cast<std::size_t>(2 * dims.d_h), 1,
                     static_cast<std::size_t>(dims.d_h), 1);
    ep.w_src = glorot(rng, static_cast<std::size_t>(2 * dims.d_h), 1,
                     static_cast<std::size_t>(dims.d_h), 1);
    ep.b = Tensor2(1, 1);
  }
  p.classifier = mlp(rng, 2 * dims.d_h, dims.cls_hidden1, dims.cls_hidden2,
                     dims.n_classes);
  p.frame_head =
      mlp(rng, dims.d_h, dims.cls_hidden1, dims.cls_hidden2, dims.n_classes);
  p.disc_f = mlp(rng, dims.disc_f_in(), dims.disc_hidden1, dims.disc_hidden2, 1);
  p.disc_v = mlp(rng, dims.disc_v_in(), dims.disc_hidden1, dims.disc_hidden2, 1);
  return p;
}

namespace {

template <class Map, class T>
void put_mlp(Map& m, const std::string& prefix, T& p) {
  m[prefix + ".l1.w"] = &p.l1.w;
  m[prefix + ".l1.b"] = &p.l1.b;
  m[prefix + ".l2.w"] = &p.l2.w;
  m[prefix + ".l2.b"] = &p.l2.b;
  m[prefix + ".l3.w"] = &p.l3.w;
  m[prefix + ".l3.b"] = &p.l3.b;
}

template <class Map, class Params>
void collect(Map& m, Params& p) {
  m["phi.l1.w"] = &p.phi.l1.w;
  m["phi.l1.b"] = &p.phi.l1.b;
  m["phi.l2.w"] = &p.phi.l2.w;
  m["phi.l2.b"] = &p.phi.l2.b;
  for (int l = 0; l < 3; ++l) {
    const std::string gp = "gat" + std::to_string(l + 1);
    m[gp + ".w"] = &p.gat[static_cast<std::size_t>(l)].w;
    m[gp + ".a_dst"] = &p.gat[static_cast<std::size_t>(l)].a_dst;
    m[gp + ".a_src"] = &p.gat[static_cast<std::size_t>(l)].a_src;
    const std::string pp = "pool" + std::to_string(l + 1);
    m[pp + ".w_dst"] = &p.pool[static_cast<std::size_t>(l)].w_dst;
    m[pp + ".w_src"] = &p.pool[static_cast<std::size_t>(l)].w_src;
    m[pp + ".b"] = &p.pool[static_cast<std::size_t>(l)].b;
  }
  put_mlp(m, "cls", p.classifier);
  put_mlp(m, "fhead", p.frame_head);
  put_mlp(m, "df", p.disc_f);
  put_mlp(m, "dv", p.disc_v);
}

}  // namespace

std::map<std::string, Tensor2*> ModelParams::named() {
  std::map<std::string, Tensor2*> m;
  collect(m, *this);
  return m;
}

std::map<std::string, const Tensor2*> ModelParams::named() const {
  std::map<std::string, const Tensor2*> m;
  collect(m, *this);
  return m;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : named()) n += t->size();
  return n;
}

}  // namespace tvgd
