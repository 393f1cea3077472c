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

#ifndef TVGD_TAPE_HPP
#define TVGD_TAPE_HPP

#include <map>
#include <string>
#include <vector>

#include "tvgd/tensor.hpp"

namespace tvgd {

enum class OpKind : std::uint8_t {
  kInput,
  kParam,
  kConst,
  kMatMul,
  kAdd,
  kSub,
  kMul,
  kAddRow,
  kLeakyRelu,
  kElu,
  kSigmoid,
  kTanh,
  kLog,
  kSoftmaxRows,
  kConcatCols,
  kConcatRows,
  kSegmentSoftmax,
  kEdgePairSum,
  kEdgeWeightedSum,
  kGatherRows,
  kGroupSumRows,
  kRowScale,
  kMeanRows,
  kMaxRows,
  kSumRows,
  kOuterRows,
  kCrossEntropy,
  kBceLogits,
  kSumAll,
  kScaleConst,
  kGrl,
};

const char* op_name(OpKind k);

/// Handle to a node on a Tape. Plain index; valid for the lifetime of the
/// tape that produced it.
struct ValueRef {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// One recorded operation. Payloads are computed eagerly as the graph is
/// built, so host code can make data-dependent structural decisions (top-k
/// neighbors, pooling matchings) mid-trace; recompute() replays the same
/// structure on fresh leaf values.
struct Node {
  OpKind kind = OpKind::kConst;
  std::vector<int> ins;
  Tensor2 val;
  Tensor2 grad;
  double scalar = 0.0;         // slope / lambda / constant / BCE target
  std::string name;            // inputs and params only
  std::vector<int> idx;        // labels, gather rows, argmax scratch
  std::vector<int> seg;        // segment offsets, size = segments + 1
  std::vector<int> edge_dst;   // destination node per edge
  std::vector<int> edge_src;   // source node per edge
};

/// Reverse-mode autodiff tape over Tensor2 payloads.
///
/// Creation order is topological order: an op may only consume existing
/// nodes. One tape serves one forward/backward pair at a time and is not
/// shared across threads.
class Tape {
 public:
  // --- leaves ---
  ValueRef input(const std::string& name, Tensor2 v);
  /// Trainable leaf. Repeated calls with the same name return the same node.
  ValueRef param(const std::string& name, const Tensor2& v);
  ValueRef constant(Tensor2 v);

  // --- dense ops ---
  ValueRef matmul(ValueRef a, ValueRef b);
  ValueRef add(ValueRef a, ValueRef b);
  ValueRef sub(ValueRef a, ValueRef b);
  ValueRef mul(ValueRef a, ValueRef b);
  /// x (r x c) plus a 1 x c row vector broadcast over rows.
  ValueRef add_row(ValueRef x, ValueRef row);
  ValueRef leaky_relu(ValueRef x, double slope = 0.2);
  ValueRef elu(ValueRef x);
  ValueRef sigmoid(ValueRef x);
  ValueRef tanh(ValueRef x);
  ValueRef log(ValueRef x);
  ValueRef softmax_rows(ValueRef logits);
  ValueRef concat_cols(ValueRef a, ValueRef b);
  ValueRef concat_rows(const std::vector<ValueRef>& parts);

  // --- graph-structured ops ---
  /// Softmax over contiguous row segments of an n x 1 column.
  /// offsets has segments+1 entries, offsets.front()=0, offsets.back()=n.
  ValueRef segment_softmax(ValueRef x, std::vector<int> offsets);
  /// out[e] = a[dst[e]] + b[src[e]] for column vectors a, b.
  ValueRef edge_pair_sum(ValueRef a, ValueRef b, std::vector<int> dst,
                         std::vector<int> src);
  /// out[m] = sum over edges e with dst[e]==m of alpha[e] * f[src[e]].
  /// alpha is E x 1, f is n x d, out is n x d.
  ValueRef edge_weighted_sum(ValueRef alpha, ValueRef f, std::vector<int> dst,
                             std::vector<int> src);
  ValueRef gather_rows(ValueRef x, std::vector<int> rows);
  /// Sums row groups: members lists input rows grouped by output row,
  /// offsets delimits the groups. out rows = offsets.size()-1.
  ValueRef group_sum_rows(ValueRef x, std::vector<int> members,
                          std::vector<int> offsets);
  /// out[i] = s[i] * x[i] rowwise; s is n x 1.
  ValueRef row_scale(ValueRef x, ValueRef s);

  // --- reductions ---
  ValueRef mean_rows(ValueRef x);  // 1 x d column means
  ValueRef max_rows(ValueRef x);   // 1 x d column maxima
  ValueRef sum_rows(ValueRef x);   // 1 x d column sums
  ValueRef sum_all(ValueRef x);    // 1 x 1

  // --- heads / losses ---
  /// Row-major flattened outer product per row: out[i] = x[i] (x) g[i].
  ValueRef outer_rows(ValueRef x, ValueRef g);
  /// Mean cross-entropy with logits over rows; labels index columns.
  ValueRef cross_entropy_logits(ValueRef logits, std::vector<int> labels);
  /// Mean binary cross-entropy with logits over rows of an n x 1 column
  /// against the constant target (0 or 1).
  ValueRef bce_logits(ValueRef logits, double target);
  ValueRef scale_const(ValueRef x, double c);
  /// Gradient reversal: identity forward, upstream gradient times -lambda
  /// backward. lambda must be >= 0.
  ValueRef grl(ValueRef x, double lambda);

  // --- execution ---
  /// Re-evaluates every non-leaf payload in topological order.
  void recompute();
  /// Feeds named inputs, recomputes, returns the payloads of the outputs
  /// previously registered with mark_output().
  std::map<std::string, Tensor2> forward(
      const std::map<std::string, Tensor2>& feeds);
  void mark_output(const std::string& name, ValueRef v);

  /// Reverse sweep from a scalar loss; fills grad on every node.
  void backward(ValueRef loss);

  // --- access ---
  const Tensor2& value(ValueRef v) const { return node_at(v).val; }
  const Tensor2& gradient(ValueRef v) const { return node_at(v).grad; }
  Node& node_at(ValueRef v);
  const Node& node_at(ValueRef v) const;
  std::size_t size() const { return nodes_.size(); }

  /// Gradients of all params, keyed by name (copies).
  std::map<std::string, Tensor2> param_grads() const;
  /// Accumulates this tape's param gradients into `into` (name -> tensor).
  void accumulate_param_grads(std::map<std::string, Tensor2>& into) const;
  ValueRef param_ref(const std::string& name) const;

 private:
  int push(Node n);
  void compute(int id);
  void backprop(int id);
  Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  [[noreturn]] void fail(int id, const std::string& msg) const;

  std::vector<Node> nodes_;
  std::map<std::string, int> params_;
  std::map<std::string, int> inputs_;
  std::map<std::string, int> outputs_;
};

}  // namespace tvgd

#endif  // TVGD_TAPE_HPP
