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

#ifndef TVGD_SGD_HPP
#define TVGD_SGD_HPP

#include <map>
#include <string>

#include "tvgd/tensor.hpp"

namespace tvgd {

/// Classical-momentum SGD with L2 weight decay folded into the raw gradient:
///   v <- momentum * v + (g + weight_decay * w)
///   w <- w - learning_rate * v
struct SgdState {
  double learning_rate = 0.001;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  std::map<std::string, Tensor2> velocity;  // lazily sized on first step
};

/// Applies one update to every named parameter. Throws on a non-finite
/// gradient, naming the offending parameter.
void sgd_step(std::map<std::string, Tensor2*>& params,
              const std::map<std::string, Tensor2>& grads, SgdState& state);

}  // namespace tvgd

#endif  // TVGD_SGD_HPP
