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

#include "tvgd/tape.hpp"

#include <cassert>
#include <cmath>
#include <cstring>
#include <limits>

#include "tvgd/error.hpp"
#include "tvgd/kernels.hpp"

namespace tvgd {

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(-|z|)) + max(z, 0) - t * z, the overflow-safe BCE-with-logits.
double stable_bce(double z, double t) {
  return std::max(z, 0.0) - t * z + std::log1p(std::exp(-std::abs(z)));
}

std::string shape_str(const Tensor2& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

}  // namespace

const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::kInput: return "input";
    case OpKind::kParam: return "param";
    case OpKind::kConst: return "const";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kAddRow: return "add_row";
    case OpKind::kLeakyRelu: return "leaky_relu";
    case OpKind::kElu: return "elu";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kTanh: return "tanh";
    case OpKind::kLog: return "log";
    case OpKind::kSoftmaxRows: return "softmax_rows";
    case OpKind::kConcatCols: return "concat_cols";
    case OpKind::kConcatRows: return "concat_rows";
    case OpKind::kSegmentSoftmax: return "segment_softmax";
    case OpKind::kEdgePairSum: return "edge_pair_sum";
    case OpKind::kEdgeWeightedSum: return "edge_weighted_sum";
    case OpKind::kGatherRows: return "gather_rows";
    case OpKind::kGroupSumRows: return "group_sum_rows";
    case OpKind::kRowScale: return "row_scale";
    case OpKind::kMeanRows: return "mean_rows";
    case OpKind::kMaxRows: return "max_rows";
    case OpKind::kSumRows: return "sum_rows";
    case OpKind::kOuterRows: return "outer_rows";
    case OpKind::kCrossEntropy: return "cross_entropy_logits";
    case OpKind::kBceLogits: return "bce_logits";
    case OpKind::kSumAll: return "sum_all";
    case OpKind::kScaleConst: return "scale_const";
    case OpKind::kGrl: return "grl";
  }
  return "?";
}

void Tape::fail(int id, const std::string& msg) const {
  std::string head = "node " + std::to_string(id);
  if (id >= 0 && id < static_cast<int>(nodes_.size())) {
    head += " (";
    head += op_name(node(id).kind);
    if (!node(id).name.empty()) head += " '" + node(id).name + "'";
    head += ")";
  }
  throw Error(head + ": " + msg);
}

Node& Tape::node_at(ValueRef v) {
  if (!v.valid() || v.id >= static_cast<int>(nodes_.size())) {
    throw Error("invalid ValueRef");
  }
  return nodes_[static_cast<std::size_t>(v.id)];
}

const Node& Tape::node_at(ValueRef v) const {
  if (!v.valid() || v.id >= static_cast<int>(nodes_.size())) {
    throw Error("invalid ValueRef");
  }
  return nodes_[static_cast<std::size_t>(v.id)];
}

int Tape::push(Node n) {
  const int id = static_cast<int>(nodes_.size());
#ifndef NDEBUG
  for (int in : n.ins) assert(in >= 0 && in < id && "inputs must precede node");
#endif
  nodes_.push_back(std::move(n));
  compute(id);
  return id;
}

ValueRef Tape::input(const std::string& name, Tensor2 v) {
  if (inputs_.count(name) != 0) throw Error("duplicate input name '" + name + "'");
  Node n;
  n.kind = OpKind::kInput;
  n.name = name;
  n.val = std::move(v);
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(n));
  inputs_[name] = id;
  return {id};
}

ValueRef Tape::param(const std::string& name, const Tensor2& v) {
  auto it = params_.find(name);
  if (it != params_.end()) return {it->second};
  Node n;
  n.kind = OpKind::kParam;
  n.name = name;
  n.val = v;
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(n));
  params_[name] = id;
  return {id};
}

ValueRef Tape::constant(Tensor2 v) {
  Node n;
  n.kind = OpKind::kConst;
  n.val = std::move(v);
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(n));
  return {id};
}

ValueRef Tape::matmul(ValueRef a, ValueRef b) {
  const Tensor2& av = value(a);
  const Tensor2& bv = value(b);
  if (av.cols() != bv.rows()) {
    fail(static_cast<int>(nodes_.size()),
         "matmul: inner dimensions disagree (" + shape_str(av) + " . " +
             shape_str(bv) + ")");
  }
  Node n;
  n.kind = OpKind::kMatMul;
  n.ins = {a.id, b.id};
  return {push(std::move(n))};
}

ValueRef Tape::add(ValueRef a, ValueRef b) {
  if (!value(a).same_shape(value(b))) {
    fail(static_cast<int>(nodes_.size()),
         "add: shapes disagree (" + shape_str(value(a)) + " vs " +
             shape_str(value(b)) + ")");
  }
  Node n;
  n.kind = OpKind::kAdd;
  n.ins = {a.id, b.id};
  return {push(std::move(n))};
}

ValueRef Tape::sub(ValueRef a, ValueRef b) {
  if (!value(a).same_shape(value(b))) {
    fail(static_cast<int>(nodes_.size()),
         "sub: shapes disagree (" + shape_str(value(a)) + " vs " +
             shape_str(value(b)) + ")");
  }
  Node n;
  n.kind = OpKind::kSub;
  n.ins = {a.id, b.id};
  return {push(std::move(n))};
}

ValueRef Tape::mul(ValueRef a, ValueRef b) {
  if (!value(a).same_shape(value(b))) {
    fail(static_cast<int>(nodes_.size()),
         "mul: shapes disagree (" + shape_str(value(a)) + " vs " +
             shape_str(value(b)) + ")");
  }
  Node n;
  n.kind = OpKind::kMul;
  n.ins = {a.id, b.id};
  return {push(std::move(n))};
}

ValueRef Tape::add_row(ValueRef x, ValueRef row) {
  if (value(row).rows() != 1 || value(row).cols() != value(x).cols()) {
    fail(static_cast<int>(nodes_.size()),
         "add_row: expected 1x" + std::to_string(value(x).cols()) +
             " row, got " + shape_str(value(row)));
  }
  Node n;
  n.kind = OpKind::kAddRow;
  n.ins = {x.id, row.id};
  return {push(std::move(n))};
}

ValueRef Tape::leaky_relu(ValueRef x, double slope) {
  Node n;
  n.kind = OpKind::kLeakyRelu;
  n.ins = {x.id};
  n.scalar = slope;
  return {push(std::move(n))};
}

ValueRef Tape::elu(ValueRef x) {
  Node n;
  n.kind = OpKind::kElu;
  n.ins = {x.id};
  return {push(std::move(n))};
}

ValueRef Tape::sigmoid(ValueRef x) {
  Node n;
  n.kind = OpKind::kSigmoid;
  n.ins = {x.id};
  return {push(std::move(n))};
}

ValueRef Tape::tanh(ValueRef x) {
  Node n;
  n.kind = OpKind::kTanh;
  n.ins = {x.id};
  return {push(std::move(n))};
}

ValueRef Tape::log(ValueRef x) {
  Node n;
  n.kind = OpKind::kLog;
  n.ins = {x.id};
  return {push(std::move(n))};
}

ValueRef Tape::softmax_rows(ValueRef logits) {
  Node n;
  n.kind = OpKind::kSoftmaxRows;
  n.ins = {logits.id};
  return {push(std::move(n))};
}

ValueRef Tape::concat_cols(ValueRef a, ValueRef b) {
  if (value(a).rows() != value(b).rows()) {
    fail(static_cast<int>(nodes_.size()),
         "concat_cols: row counts disagree (" + shape_str(value(a)) + " vs " +
             shape_str(value(b)) + ")");
  }
  Node n;
  n.kind = OpKind::kConcatCols;
  n.ins = {a.id, b.id};
  return {push(std::move(n))};
}

ValueRef Tape::concat_rows(const std::vector<ValueRef>& parts) {
  if (parts.empty()) {
    fail(static_cast<int>(nodes_.size()), "concat_rows: no parts");
  }
  Node n;
  n.kind = OpKind::kConcatRows;
  const std::size_t cols = value(parts[0]).cols();
  for (ValueRef p : parts) {
    if (value(p).cols() != cols) {
      fail(static_cast<int>(nodes_.size()),
           "concat_rows: column counts disagree");
    }
    n.ins.push_back(p.id);
  }
  return {push(std::move(n))};
}

ValueRef Tape::segment_softmax(ValueRef x, std::vector<int> offsets) {
  const Tensor2& xv = value(x);
  if (xv.cols() != 1) {
    fail(static_cast<int>(nodes_.size()),
         "segment_softmax: expected a column vector, got " + shape_str(xv));
  }
  if (offsets.size() < 2 || offsets.front() != 0 ||
      offsets.back() != static_cast<int>(xv.rows())) {
    fail(static_cast<int>(nodes_.size()),
         "segment_softmax: offsets must start at 0 and end at row count");
  }
  for (std::size_t s = 1; s < offsets.size(); ++s) {
    if (offsets[s] <= offsets[s - 1]) {
      fail(static_cast<int>(nodes_.size()),
           "segment_softmax: empty or descending segment " + std::to_string(s - 1));
    }
  }
  Node n;
  n.kind = OpKind::kSegmentSoftmax;
  n.ins = {x.id};
  n.seg = std::move(offsets);
  return {push(std::move(n))};
}

ValueRef Tape::edge_pair_sum(ValueRef a, ValueRef b, std::vector<int> dst,
                             std::vector<int> src) {
  if (value(a).cols() != 1 || value(b).cols() != 1) {
    fail(static_cast<int>(nodes_.size()),
         "edge_pair_sum: expects column vectors");
  }
  if (dst.size() != src.size()) {
    fail(static_cast<int>(nodes_.size()),
         "edge_pair_sum: edge lists differ in length");
  }
  Node n;
  n.kind = OpKind::kEdgePairSum;
  n.ins = {a.id, b.id};
  n.edge_dst = std::move(dst);
  n.edge_src = std::move(src);
  return {push(std::move(n))};
}

ValueRef Tape::edge_weighted_sum(ValueRef alpha, ValueRef f,
                                 std::vector<int> dst, std::vector<int> src) {
  if (value(alpha).cols() != 1 ||
      value(alpha).rows() != dst.size() || dst.size() != src.size()) {
    fail(static_cast<int>(nodes_.size()),
         "edge_weighted_sum: alpha must be E x 1 matching the edge lists");
  }
  Node n;
  n.kind = OpKind::kEdgeWeightedSum;
  n.ins = {alpha.id, f.id};
  n.edge_dst = std::move(dst);
  n.edge_src = std::move(src);
  return {push(std::move(n))};
}

ValueRef Tape::gather_rows(ValueRef x, std::vector<int> rows) {
  for (int r : rows) {
    if (r < 0 || r >= static_cast<int>(value(x).rows())) {
      fail(static_cast<int>(nodes_.size()),
           "gather_rows: row index out of range");
    }
  }
  Node n;
  n.kind = OpKind::kGatherRows;
  n.ins = {x.id};
  n.idx = std::move(rows);
  return {push(std::move(n))};
}

ValueRef Tape::group_sum_rows(ValueRef x, std::vector<int> members,
                              std::vector<int> offsets) {
  if (offsets.size() < 2 || offsets.front() != 0 ||
      offsets.back() != static_cast<int>(members.size())) {
    fail(static_cast<int>(nodes_.size()), "group_sum_rows: bad offsets");
  }
  Node n;
  n.kind = OpKind::kGroupSumRows;
  n.ins = {x.id};
  n.idx = std::move(members);
  n.seg = std::move(offsets);
  return {push(std::move(n))};
}

ValueRef Tape::row_scale(ValueRef x, ValueRef s) {
  if (value(s).cols() != 1 || value(s).rows() != value(x).rows()) {
    fail(static_cast<int>(nodes_.size()),
         "row_scale: scale must be n x 1 matching x rows");
  }
  Node n;
  n.kind = OpKind::kRowScale;
  n.ins = {x.id, s.id};
  return {push(std::move(n))};
}

ValueRef Tape::mean_rows(ValueRef x) {
  if (value(x).rows() == 0) {
    fail(static_cast<int>(nodes_.size()), "mean_rows: empty input");
  }
  Node n;
  n.kind = OpKind::kMeanRows;
  n.ins = {x.id};
  return {push(std::move(n))};
}

ValueRef Tape::max_rows(ValueRef x) {
  if (value(x).rows() == 0) {
    fail(static_cast<int>(nodes_.size()), "max_rows: empty input");
  }
  Node n;
  n.kind = OpKind::kMaxRows;
  n.ins = {x.id};
  return {push(std::move(n))};
}

ValueRef Tape::sum_rows(ValueRef x) {
  Node n;
  n.kind = OpKind::kSumRows;
  n.ins = {x.id};
  return {push(std::move(n))};
}

ValueRef Tape::sum_all(ValueRef x) {
  Node n;
  n.kind = OpKind::kSumAll;
  n.ins = {x.id};
  return {push(std::move(n))};
}

ValueRef Tape::outer_rows(ValueRef x, ValueRef g) {
  if (value(x).rows() != value(g).rows()) {
    fail(static_cast<int>(nodes_.size()), "outer_rows: row counts disagree");
  }
  Node n;
  n.kind = OpKind::kOuterRows;
  n.ins = {x.id, g.id};
  return {push(std::move(n))};
}

ValueRef Tape::cross_entropy_logits(ValueRef logits, std::vector<int> labels) {
  const Tensor2& lv = value(logits);
  if (labels.size() != lv.rows()) {
    fail(static_cast<int>(nodes_.size()),
         "cross_entropy_logits: label count != row count");
  }
  for (int y : labels) {
    if (y < 0 || y >= static_cast<int>(lv.cols())) {
      fail(static_cast<int>(nodes_.size()),
           "cross_entropy_logits: label out of range");
    }
  }
  Node n;
  n.kind = OpKind::kCrossEntropy;
  n.ins = {logits.id};
  n.idx = std::move(labels);
  return {push(std::move(n))};
}

ValueRef Tape::bce_logits(ValueRef logits, double target) {
  if (value(logits).cols() != 1) {
    fail(static_cast<int>(nodes_.size()),
         "bce_logits: expected an n x 1 logit column");
  }
  if (target != 0.0 && target != 1.0) {
    fail(static_cast<int>(nodes_.size()), "bce_logits: target must be 0 or 1");
  }
  Node n;
  n.kind = OpKind::kBceLogits;
  n.ins = {logits.id};
  n.scalar = target;
  return {push(std::move(n))};
}

ValueRef Tape::scale_const(ValueRef x, double c) {
  Node n;
  n.kind = OpKind::kScaleConst;
  n.ins = {x.id};
  n.scalar = c;
  return {push(std::move(n))};
}

ValueRef Tape::grl(ValueRef x, double lambda) {
  if (lambda < 0.0) {
    fail(static_cast<int>(nodes_.size()), "grl: lambda must be >= 0");
  }
  Node n;
  n.kind = OpKind::kGrl;
  n.ins = {x.id};
  n.scalar = lambda;
  return {push(std::move(n))};
}

void Tape::compute(int id) {
  Node& n = node(id);
  const auto& K = kernels::active();
  auto in = [&](std::size_t i) -> const Tensor2& {
    return node(n.ins[i]).val;
  };
  switch (n.kind) {
    case OpKind::kInput:
    case OpKind::kParam:
    case OpKind::kConst:
      break;
    case OpKind::kMatMul: {
      const Tensor2& a = in(0);
      const Tensor2& b = in(1);
      n.val = Tensor2(a.rows(), b.cols());
      K.matmul_nn(a.data(), b.data(), n.val.data(), a.rows(), a.cols(),
                  b.cols());
      break;
    }
    case OpKind::kAdd: {
      n.val = Tensor2(in(0).rows(), in(0).cols());
      K.add(in(0).data(), in(1).data(), n.val.data(), n.val.size());
      break;
    }
    case OpKind::kSub: {
      n.val = Tensor2(in(0).rows(), in(0).cols());
      K.sub(in(0).data(), in(1).data(), n.val.data(), n.val.size());
      break;
    }
    case OpKind::kMul: {
      n.val = Tensor2(in(0).rows(), in(0).cols());
      K.mul(in(0).data(), in(1).data(), n.val.data(), n.val.size());
      break;
    }
    case OpKind::kAddRow: {
      n.val = in(0);
      K.add_row(n.val.data(), in(1).data(), n.val.rows(), n.val.cols());
      break;
    }
    case OpKind::kLeakyRelu: {
      n.val = Tensor2(in(0).rows(), in(0).cols());
      K.leaky_relu(in(0).data(), n.val.data(), n.val.size(), n.scalar);
      break;
    }
    case OpKind::kElu: {
      n.val = Tensor2(in(0).rows(), in(0).cols());
      const double* x = in(0).data();
      double* out = n.val.data();
      for (std::size_t i = 0; i < n.val.size(); ++i) {
        out[i] = x[i] > 0.0 ? x[i] : std::expm1(x[i]);
      }
      break;
    }
    case OpKind::kSigmoid: {
      n.val = Tensor2(in(0).rows(), in(0).cols());
      const double* x = in(0).data();
      double* out = n.val.data();
      for (std::size_t i = 0; i < n.val.size(); ++i) out[i] = stable_sigmoid(x[i]);
      break;
    }
    case OpKind::kTanh: {
      n.val = Tensor2(in(0).rows(), in(0).cols());
      const double* x = in(0).data();
      double* out = n.val.data();
      for (std::size_t i = 0; i < n.val.size(); ++i) out[i] = std::tanh(x[i]);
      break;
    }
    case OpKind::kLog: {
      n.val = Tensor2(in(0).rows(), in(0).cols());
      const double* x = in(0).data();
      double* out = n.val.data();
      for (std::size_t i = 0; i < n.val.size(); ++i) {
        if (x[i] <= 0.0) fail(id, "log: nonpositive input");
        out[i] = std::log(x[i]);
      }
      break;
    }
    case OpKind::kSoftmaxRows: {
      const Tensor2& x = in(0);
      n.val = Tensor2(x.rows(), x.cols());
      for (std::size_t r = 0; r < x.rows(); ++r) {
        const double* xr = x.row(r);
        double* outr = n.val.row(r);
        double mx = xr[0];
        for (std::size_t c = 1; c < x.cols(); ++c) mx = std::max(mx, xr[c]);
        double denom = 0.0;
        for (std::size_t c = 0; c < x.cols(); ++c) {
          outr[c] = std::exp(xr[c] - mx);
          denom += outr[c];
        }
        for (std::size_t c = 0; c < x.cols(); ++c) outr[c] /= denom;
      }
      break;
    }
    case OpKind::kConcatCols: {
      const Tensor2& a = in(0);
      const Tensor2& b = in(1);
      n.val = Tensor2(a.rows(), a.cols() + b.cols());
      for (std::size_t r = 0; r < a.rows(); ++r) {
        std::memcpy(n.val.row(r), a.row(r), a.cols() * sizeof(double));
        std::memcpy(n.val.row(r) + a.cols(), b.row(r), b.cols() * sizeof(double));
      }
      break;
    }
    case OpKind::kConcatRows: {
      std::size_t rows = 0;
      for (int i : n.ins) rows += node(i).val.rows();
      n.val = Tensor2(rows, node(n.ins[0]).val.cols());
      std::size_t r0 = 0;
      for (int i : n.ins) {
        const Tensor2& p = node(i).val;
        std::memcpy(n.val.row(r0), p.data(), p.size() * sizeof(double));
        r0 += p.rows();
      }
      break;
    }
    case OpKind::kSegmentSoftmax: {
      const Tensor2& x = in(0);
      n.val = Tensor2(x.rows(), 1);
      for (std::size_t s = 0; s + 1 < n.seg.size(); ++s) {
        const int lo = n.seg[s];
        const int hi = n.seg[s + 1];
        double mx = x.data()[lo];
        for (int i = lo + 1; i < hi; ++i) mx = std::max(mx, x.data()[i]);
        double denom = 0.0;
        for (int i = lo; i < hi; ++i) {
          n.val.data()[i] = std::exp(x.data()[i] - mx);
          denom += n.val.data()[i];
        }
        for (int i = lo; i < hi; ++i) n.val.data()[i] /= denom;
      }
      break;
    }
    case OpKind::kEdgePairSum: {
      const Tensor2& a = in(0);
      const Tensor2& b = in(1);
      n.val = Tensor2(n.edge_dst.size(), 1);
      for (std::size_t e = 0; e < n.edge_dst.size(); ++e) {
        n.val.data()[e] = a.data()[n.edge_dst[e]] + b.data()[n.edge_src[e]];
      }
      break;
    }
    case OpKind::kEdgeWeightedSum: {
      const Tensor2& alpha = in(0);
      const Tensor2& f = in(1);
      n.val = Tensor2(f.rows(), f.cols());
      const auto& Kk = kernels::active();
      for (std::size_t e = 0; e < n.edge_dst.size(); ++e) {
        Kk.axpy(alpha.data()[e], f.row(static_cast<std::size_t>(n.edge_src[e])),
                n.val.row(static_cast<std::size_t>(n.edge_dst[e])), f.cols());
      }
      break;
    }
    case OpKind::kGatherRows: {
      const Tensor2& x = in(0);
      n.val = Tensor2(n.idx.size(), x.cols());
      for (std::size_t i = 0; i < n.idx.size(); ++i) {
        std::memcpy(n.val.row(i), x.row(static_cast<std::size_t>(n.idx[i])),
                    x.cols() * sizeof(double));
      }
      break;
    }
    case OpKind::kGroupSumRows: {
      const Tensor2& x = in(0);
      n.val = Tensor2(n.seg.size() - 1, x.cols());
      for (std::size_t c = 0; c + 1 < n.seg.size(); ++c) {
        for (int t = n.seg[c]; t < n.seg[c + 1]; ++t) {
          K.axpy(1.0, x.row(static_cast<std::size_t>(n.idx[static_cast<std::size_t>(t)])),
                 n.val.row(c), x.cols());
        }
      }
      break;
    }
    case OpKind::kRowScale: {
      const Tensor2& x = in(0);
      const Tensor2& s = in(1);
      n.val = Tensor2(x.rows(), x.cols());
      for (std::size_t r = 0; r < x.rows(); ++r) {
        K.axpy(s.data()[r], x.row(r), n.val.row(r), x.cols());
      }
      break;
    }
    case OpKind::kMeanRows: {
      const Tensor2& x = in(0);
      n.val = Tensor2(1, x.cols());
      K.col_sum(x.data(), n.val.data(), x.rows(), x.cols());
      K.scale(1.0 / static_cast<double>(x.rows()), n.val.data(), x.cols());
      break;
    }
    case OpKind::kMaxRows: {
      const Tensor2& x = in(0);
      n.val = Tensor2(1, x.cols());
      K.col_max(x.data(), n.val.data(), x.rows(), x.cols());
      // Argmax bookkeeping for the backward scatter (first max wins).
      n.idx.assign(x.cols(), 0);
      for (std::size_t c = 0; c < x.cols(); ++c) {
        for (std::size_t r = 0; r < x.rows(); ++r) {
          if (x.at(r, c) == n.val.data()[c]) {
            n.idx[c] = static_cast<int>(r);
            break;
          }
        }
      }
      break;
    }
    case OpKind::kSumRows: {
      const Tensor2& x = in(0);
      n.val = Tensor2(1, x.cols());
      K.col_sum(x.data(), n.val.data(), x.rows(), x.cols());
      break;
    }
    case OpKind::kOuterRows: {
      const Tensor2& x = in(0);
      const Tensor2& g = in(1);
      n.val = Tensor2(x.rows(), x.cols() * g.cols());
      for (std::size_t r = 0; r < x.rows(); ++r) {
        double* out = n.val.row(r);
        for (std::size_t f = 0; f < x.cols(); ++f) {
          K.axpy(x.at(r, f), g.row(r), out + f * g.cols(), g.cols());
        }
      }
      break;
    }
    case OpKind::kCrossEntropy: {
      const Tensor2& z = in(0);
      double total = 0.0;
      for (std::size_t r = 0; r < z.rows(); ++r) {
        const double* zr = z.row(r);
        double mx = zr[0];
        for (std::size_t c = 1; c < z.cols(); ++c) mx = std::max(mx, zr[c]);
        double denom = 0.0;
        for (std::size_t c = 0; c < z.cols(); ++c) denom += std::exp(zr[c] - mx);
        const double lse = std::log(denom) + mx;
        total += lse - zr[n.idx[r]];
      }
      n.val = Tensor2::scalar(total / static_cast<double>(z.rows()));
      break;
    }
    case OpKind::kBceLogits: {
      const Tensor2& z = in(0);
      double total = 0.0;
      for (std::size_t r = 0; r < z.rows(); ++r) {
        total += stable_bce(z.data()[r], n.scalar);
      }
      n.val = Tensor2::scalar(total / static_cast<double>(z.rows()));
      break;
    }
    case OpKind::kSumAll: {
      const Tensor2& x = in(0);
      double total = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) total += x.data()[i];
      n.val = Tensor2::scalar(total);
      break;
    }
    case OpKind::kScaleConst: {
      n.val = in(0);
      K.scale(n.scalar, n.val.data(), n.val.size());
      break;
    }
    case OpKind::kGrl: {
      n.val = in(0);
      break;
    }
  }
}

void Tape::recompute() {
  for (int id = 0; id < static_cast<int>(nodes_.size()); ++id) {
    if (node(id).kind == OpKind::kInput || node(id).kind == OpKind::kParam ||
        node(id).kind == OpKind::kConst) {
      continue;
    }
    compute(id);
  }
}

void Tape::mark_output(const std::string& name, ValueRef v) {
  node_at(v);  // validates
  outputs_[name] = v.id;
}

std::map<std::string, Tensor2> Tape::forward(
    const std::map<std::string, Tensor2>& feeds) {
  for (const auto& [name, id] : inputs_) {
    auto it = feeds.find(name);
    if (it == feeds.end()) throw Error("forward: missing feed for input '" + name + "'");
    if (!it->second.same_shape(node(id).val)) {
      fail(id, "forward: feed shape " + shape_str(it->second) +
                   " != declared " + shape_str(node(id).val));
    }
    node(id).val = it->second;
  }
  for (const auto& [name, t] : feeds) {
    if (inputs_.count(name) == 0) throw Error("forward: unknown input '" + name + "'");
    (void)t;
  }
  recompute();
  std::map<std::string, Tensor2> out;
  for (const auto& [name, id] : outputs_) out[name] = node(id).val;
  return out;
}

void Tape::backward(ValueRef loss) {
  const Node& ln = node_at(loss);
  if (ln.val.rows() != 1 || ln.val.cols() != 1) {
    fail(loss.id, "backward: loss must be a 1x1 scalar, got " + shape_str(ln.val));
  }
  for (auto& n : nodes_) {
    n.grad = Tensor2(n.val.rows(), n.val.cols());
  }
  node(loss.id).grad.at(0, 0) = 1.0;
  for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
    backprop(id);
  }
}

void Tape::backprop(int id) {
  Node& n = node(id);
  const auto& K = kernels::active();
  auto inv = [&](std::size_t i) -> const Tensor2& { return node(n.ins[i]).val; };
  auto ing = [&](std::size_t i) -> Tensor2& { return node(n.ins[i]).grad; };
  const Tensor2& g = n.grad;
  switch (n.kind) {
    case OpKind::kInput:
    case OpKind::kParam:
    case OpKind::kConst:
      break;
    case OpKind::kMatMul: {
      const Tensor2& a = inv(0);
      const Tensor2& b = inv(1);
      // dA += g . B^T ; dB += A^T . g
      K.matmul_nt(g.data(), b.data(), ing(0).data(), a.rows(), b.cols(), a.cols());
      K.matmul_tn(a.data(), g.data(), ing(1).data(), a.cols(), a.rows(), b.cols());
      break;
    }
    case OpKind::kAdd: {
      K.axpy(1.0, g.data(), ing(0).data(), g.size());
      K.axpy(1.0, g.data(), ing(1).data(), g.size());
      break;
    }
    case OpKind::kSub: {
      K.axpy(1.0, g.data(), ing(0).data(), g.size());
      K.axpy(-1.0, g.data(), ing(1).data(), g.size());
      break;
    }
    case OpKind::kMul: {
      Tensor2 tmp(g.rows(), g.cols());
      K.mul(g.data(), inv(1).data(), tmp.data(), g.size());
      K.axpy(1.0, tmp.data(), ing(0).data(), g.size());
      K.mul(g.data(), inv(0).data(), tmp.data(), g.size());
      K.axpy(1.0, tmp.data(), ing(1).data(), g.size());
      break;
    }
    case OpKind::kAddRow: {
      K.axpy(1.0, g.data(), ing(0).data(), g.size());
      K.col_sum(g.data(), ing(1).data(), g.rows(), g.cols());
      break;
    }
    case OpKind::kLeakyRelu: {
      Tensor2 tmp(g.rows(), g.cols());
      K.leaky_relu_grad(inv(0).data(), g.data(), tmp.data(), g.size(), n.scalar);
      K.axpy(1.0, tmp.data(), ing(0).data(), g.size());
      break;
    }
    case OpKind::kElu: {
      const double* x = inv(0).data();
      double* dx = ing(0).data();
      // d elu = 1 for x > 0 else elu(x) + 1 = exp(x)
      for (std::size_t i = 0; i < g.size(); ++i) {
        dx[i] += x[i] > 0.0 ? g.data()[i] : g.data()[i] * (n.val.data()[i] + 1.0);
      }
      break;
    }
    case OpKind::kSigmoid: {
      const double* s = n.val.data();
      double* dx = ing(0).data();
      for (std::size_t i = 0; i < g.size(); ++i) {
        dx[i] += g.data()[i] * s[i] * (1.0 - s[i]);
      }
      break;
    }
    case OpKind::kTanh: {
      const double* t = n.val.data();
      double* dx = ing(0).data();
      for (std::size_t i = 0; i < g.size(); ++i) {
        dx[i] += g.data()[i] * (1.0 - t[i] * t[i]);
      }
      break;
    }
    case OpKind::kLog: {
      const double* x = inv(0).data();
      double* dx = ing(0).data();
      for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g.data()[i] / x[i];
      break;
    }
    case OpKind::kSoftmaxRows: {
      const Tensor2& p = n.val;
      Tensor2& dx = ing(0);
      for (std::size_t r = 0; r < p.rows(); ++r) {
        const double* pr = p.row(r);
        const double* gr = g.row(r);
        double dot = 0.0;
        for (std::size_t c = 0; c < p.cols(); ++c) dot += gr[c] * pr[c];
        double* dxr = dx.row(r);
        for (std::size_t c = 0; c < p.cols(); ++c) {
          dxr[c] += pr[c] * (gr[c] - dot);
        }
      }
      break;
    }
    case OpKind::kConcatCols: {
      Tensor2& da = ing(0);
      Tensor2& db = ing(1);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        K.axpy(1.0, g.row(r), da.row(r), da.cols());
        K.axpy(1.0, g.row(r) + da.cols(), db.row(r), db.cols());
      }
      break;
    }
    case OpKind::kConcatRows: {
      std::size_t r0 = 0;
      for (int i : n.ins) {
        Tensor2& di = node(i).grad;
        K.axpy(1.0, g.row(r0), di.data(), di.size());
        r0 += di.rows();
      }
      break;
    }
    case OpKind::kSegmentSoftmax: {
      const Tensor2& p = n.val;
      Tensor2& dx = ing(0);
      for (std::size_t s = 0; s + 1 < n.seg.size(); ++s) {
        const int lo = n.seg[s];
        const int hi = n.seg[s + 1];
        double dot = 0.0;
        for (int i = lo; i < hi; ++i) dot += g.data()[i] * p.data()[i];
        for (int i = lo; i < hi; ++i) {
          dx.data()[i] += p.data()[i] * (g.data()[i] - dot);
        }
      }
      break;
    }
    case OpKind::kEdgePairSum: {
      Tensor2& da = ing(0);
      Tensor2& db = ing(1);
      for (std::size_t e = 0; e < n.edge_dst.size(); ++e) {
        da.data()[n.edge_dst[e]] += g.data()[e];
        db.data()[n.edge_src[e]] += g.data()[e];
      }
      break;
    }
    case OpKind::kEdgeWeightedSum: {
      const Tensor2& alpha = inv(0);
      const Tensor2& f = inv(1);
      Tensor2& dalpha = ing(0);
      Tensor2& df = ing(1);
      for (std::size_t e = 0; e < n.edge_dst.size(); ++e) {
        const auto d = static_cast<std::size_t>(n.edge_dst[e]);
        const auto s = static_cast<std::size_t>(n.edge_src[e]);
        const double* grow = g.row(d);
        const double* frow = f.row(s);
        double dot = 0.0;
        for (std::size_t c = 0; c < f.cols(); ++c) dot += grow[c] * frow[c];
        dalpha.data()[e] += dot;
        K.axpy(alpha.data()[e], grow, df.row(s), f.cols());
      }
      break;
    }
    case OpKind::kGatherRows: {
      Tensor2& dx = ing(0);
      for (std::size_t i = 0; i < n.idx.size(); ++i) {
        K.axpy(1.0, g.row(i), dx.row(static_cast<std::size_t>(n.idx[i])), dx.cols());
      }
      break;
    }
    case OpKind::kGroupSumRows: {
      Tensor2& dx = ing(0);
      for (std::size_t c = 0; c + 1 < n.seg.size(); ++c) {
        for (int t = n.seg[c]; t < n.seg[c + 1]; ++t) {
          K.axpy(1.0, g.row(c),
                 dx.row(static_cast<std::size_t>(n.idx[static_cast<std::size_t>(t)])),
                 dx.cols());
        }
      }
      break;
    }
    case OpKind::kRowScale: {
      const Tensor2& x = inv(0);
      const Tensor2& s = inv(1);
      Tensor2& dx = ing(0);
      Tensor2& ds = ing(1);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        K.axpy(s.data()[r], g.row(r), dx.row(r), x.cols());
        const double* gr = g.row(r);
        const double* xr = x.row(r);
        double dot = 0.0;
        for (std::size_t c = 0; c < x.cols(); ++c) dot += gr[c] * xr[c];
        ds.data()[r] += dot;
      }
      break;
    }
    case OpKind::kMeanRows: {
      Tensor2& dx = ing(0);
      const double inv_rows = 1.0 / static_cast<double>(dx.rows());
      for (std::size_t r = 0; r < dx.rows(); ++r) {
        K.axpy(inv_rows, g.data(), dx.row(r), dx.cols());
      }
      break;
    }
    case OpKind::kMaxRows: {
      Tensor2& dx = ing(0);
      for (std::size_t c = 0; c < dx.cols(); ++c) {
        dx.at(static_cast<std::size_t>(n.idx[c]), c) += g.data()[c];
      }
      break;
    }
    case OpKind::kSumRows: {
      Tensor2& dx = ing(0);
      for (std::size_t r = 0; r < dx.rows(); ++r) {
        K.axpy(1.0, g.data(), dx.row(r), dx.cols());
      }
      break;
    }
    case OpKind::kOuterRows: {
      const Tensor2& x = inv(0);
      const Tensor2& y = inv(1);
      Tensor2& dx = ing(0);
      Tensor2& dy = ing(1);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        const double* gr = g.row(r);
        for (std::size_t f = 0; f < x.cols(); ++f) {
          const double* gblk = gr + f * y.cols();
          const double* yr = y.row(r);
          double dot = 0.0;
          for (std::size_t c = 0; c < y.cols(); ++c) dot += gblk[c] * yr[c];
          dx.at(r, f) += dot;
          K.axpy(x.at(r, f), gblk, dy.row(r), y.cols());
        }
      }
      break;
    }
    case OpKind::kCrossEntropy: {
      const Tensor2& z = inv(0);
      Tensor2& dz = ing(0);
      const double go = g.at(0, 0) / static_cast<double>(z.rows());
      for (std::size_t r = 0; r < z.rows(); ++r) {
        const double* zr = z.row(r);
        double mx = zr[0];
        for (std::size_t c = 1; c < z.cols(); ++c) mx = std::max(mx, zr[c]);
        double denom = 0.0;
        for (std::size_t c = 0; c < z.cols(); ++c) denom += std::exp(zr[c] - mx);
        double* dzr = dz.row(r);
        for (std::size_t c = 0; c < z.cols(); ++c) {
          const double p = std::exp(zr[c] - mx) / denom;
          dzr[c] += go * (p - (static_cast<int>(c) == n.idx[r] ? 1.0 : 0.0));
        }
      }
      break;
    }
    case OpKind::kBceLogits: {
      const Tensor2& z = inv(0);
      Tensor2& dz = ing(0);
      const double go = g.at(0, 0) / static_cast<double>(z.rows());
      for (std::size_t r = 0; r < z.rows(); ++r) {
        dz.data()[r] += go * (stable_sigmoid(z.data()[r]) - n.scalar);
      }
      break;
    }
    case OpKind::kSumAll: {
      Tensor2& dx = ing(0);
      const double go = g.at(0, 0);
      for (std::size_t i = 0; i < dx.size(); ++i) dx.data()[i] += go;
      break;
    }
    case OpKind::kScaleConst: {
      K.axpy(n.scalar, g.data(), ing(0).data(), g.size());
      break;
    }
    case OpKind::kGrl: {
      K.axpy(-n.scalar, g.data(), ing(0).data(), g.size());
      break;
    }
  }
}

std::map<std::string, Tensor2> Tape::param_grads() const {
  std::map<std::string, Tensor2> out;
  for (const auto& [name, id] : params_) out[name] = node(id).grad;
  return out;
}

void Tape::accumulate_param_grads(std::map<std::string, Tensor2>& into) const {
  const auto& K = kernels::active();
  for (const auto& [name, id] : params_) {
    const Tensor2& gsrc = node(id).grad;
    auto it = into.find(name);
    if (it == into.end()) {
      into.emplace(name, gsrc);
    } else {
      if (!it->second.same_shape(gsrc)) {
        throw Error("gradient shape mismatch for param '" + name + "'");
      }
      K.axpy(1.0, gsrc.data(), it->second.data(), gsrc.size());
    }
  }
}

ValueRef Tape::param_ref(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw Error("unknown param '" + name + "'");
  return {it->second};
}

}  // namespace tvgd
