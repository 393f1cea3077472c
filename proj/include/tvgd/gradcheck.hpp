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

#ifndef TVGD_GRADCHECK_HPP
#define TVGD_GRADCHECK_HPP

#include "tvgd/tape.hpp"

namespace tvgd {

/// Central-difference check of the recorded gradient of `loss` with respect
/// to one leaf. Perturbs each entry of the leaf payload by +-h, replays the
/// tape (graph structure stays frozen), and returns
///   max_i |g_auto - g_fd| / max(1e-12, |g_auto| + |g_fd|).
/// backward(loss) must have run already so grads are populated.
double finite_diff_check(Tape& tape, ValueRef loss, ValueRef leaf, double h);

}  // namespace tvgd

#endif  // TVGD_GRADCHECK_HPP
