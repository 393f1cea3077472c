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

#include "tvgd/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "tvgd/error.hpp"

namespace tvgd {

double finite_diff_check(Tape& tape, ValueRef loss, ValueRef leaf, double h) {
  if (h <= 0.0) throw Error("finite_diff_check: h must be > 0");
  Node& ln = tape.node_at(loss);
  if (ln.val.rows() != 1 || ln.val.cols() != 1) {
    throw Error("finite_diff_check: loss must be scalar");
  }
  Node& leaf_node = tape.node_at(leaf);
  if (leaf_node.kind != OpKind::kParam && leaf_node.kind != OpKind::kInput) {
    throw Error("finite_diff_check: leaf must be a param or input node");
  }
  const Tensor2 recorded_grad = leaf_node.grad;
  if (!recorded_grad.same_shape(leaf_node.val)) {
    throw Error("finite_diff_check: run backward() before the check");
  }

  double max_rel = 0.0;
  for (std::size_t i = 0; i < leaf_node.val.size(); ++i) {
    const double saved = leaf_node.val.data()[i];
    leaf_node.val.data()[i] = saved + h;
    tape.recompute();
    const double up = tape.node_at(loss).val.at(0, 0);
    leaf_node.val.data()[i] = saved - h;
    tape.recompute();
    const double down = tape.node_at(loss).val.at(0, 0);
    leaf_node.val.data()[i] = saved;
    const double g_fd = (up - down) / (2.0 * h);
    const double g_auto = recorded_grad.data()[i];
    const double rel = std::abs(g_auto - g_fd) /
                       std::max(1e-12, std::abs(g_auto) + std::abs(g_fd));
    max_rel = std::max(max_rel, rel);
  }
  tape.recompute();  // restore payloads
  return max_rel;
}

}  // namespace tvgd
