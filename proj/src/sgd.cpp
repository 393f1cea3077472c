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

#include "tvgd/sgd.hpp"

#include <cmath>

#include "tvgd/error.hpp"
#include "tvgd/kernels.hpp"

namespace tvgd {

void sgd_step(std::map<std::string, Tensor2*>& params,
              const std::map<std::string, Tensor2>& grads, SgdState& state) {
  const auto& K = kernels::active();
  for (auto& [name, w] : params) {
    auto git = grads.find(name);
    if (git == grads.end()) continue;  // param not touched this step
    const Tensor2& g = git->second;
    if (!g.same_shape(*w)) {
      throw Error("sgd_step: gradient shape mismatch for '" + name + "'");
    }
    if (!g.all_finite()) {
      throw Error("sgd_step: non-finite gradient for parameter '" + name + "'");
    }
    Tensor2& v = state.velocity[name];
    if (!v.same_shape(*w)) v = Tensor2(w->rows(), w->cols());
    double* vd = v.data();
    double* wd = w->data();
    const double* gd = g.data();
    for (std::size_t i = 0; i < v.size(); ++i) {
      vd[i] = state.momentum * vd[i] + (gd[i] + state.weight_decay * wd[i]);
    }
    K.axpy(-state.learning_rate, vd, wd, v.size());
  }
}

}  // namespace tvgd
