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

#include "tvgd/gnn.hpp"

#include <algorithm>
#include <numeric>

#include "tvgd/error.hpp"

namespace tvgd {

GraphStructure graph_structure(const VideoGraph& g) {
  GraphStructure s;
  s.n = static_cast<int>(g.node_count());
  s.self_loops = g.self_loops;
  s.seg.assign(static_cast<std::size_t>(s.n) + 1, 0);
  s.dst.reserve(g.nbrs.size());
  s.src.reserve(g.nbrs.size());
  for (int m = 0; m < s.n; ++m) {
    for (int e = g.nbr_offsets[static_cast<std::size_t>(m)];
         e < g.nbr_offsets[static_cast<std::size_t>(m) + 1]; ++e) {
      s.dst.push_back(m);
      s.src.push_back(g.nbrs[static_cast<std::size_t>(e)]);
    }
    s.seg[static_cast<std::size_t>(m) + 1] = static_cast<int>(s.dst.size());
  }
  return s;
}

ValueRef encode_frames(Tape& t, ValueRef frames, const FrameEncoderParams& p) {
  if (t.value(frames).cols() != p.l1.w.rows()) {
    throw Error("encode_frames: feature width " +
                std::to_string(t.value(frames).cols()) + " != encoder input " +
                std::to_string(p.l1.w.rows()));
  }
  auto h = t.leaky_relu(
      t.add_row(t.matmul(frames, t.param("phi.l1.w", p.l1.w)),
                t.param("phi.l1.b", p.l1.b)),
      0.2);
  return t.add_row(t.matmul(h, t.param("phi.l2.w", p.l2.w)),
                   t.param("phi.l2.b", p.l2.b));
}

GatResult gat_forward(Tape& t, ValueRef v, const GraphStructure& g,
                      const GatLayerParams& p, const std::string& prefix) {
  for (int m = 0; m < g.n; ++m) {
    if (g.seg[static_cast<std::size_t>(m) + 1] == g.seg[static_cast<std::size_t>(m)]) {
      throw Error("gat_forward: node " + std::to_string(m) +
                  " has an empty neighborhood (enable self-loops)");
    }
  }
  auto w = t.param(prefix + ".w", p.w);
  auto vw = t.matmul(v, w);  // n x d_h
  auto s_dst = t.matmul(vw, t.param(prefix + ".a_dst", p.a_dst));  // n x 1
  auto s_src = t.matmul(vw, t.param(prefix + ".a_src", p.a_src));  // n x 1
  auto logits =
      t.leaky_relu(t.edge_pair_sum(s_dst, s_src, g.dst, g.src), p.leaky_slope);
  auto alpha = t.segment_softmax(logits, g.seg);
  auto agg = t.edge_weighted_sum(alpha, vw, g.dst, g.src);
  return {t.elu(agg), alpha};
}

PoolResult edge_pool(Tape& t, ValueRef v, const GraphStructure& g,
                     const EdgePoolParams& p, const std::string& prefix) {
  const int n = g.n;
  // Every directed non-loop edge is a contraction candidate with its own
  // score; the candidate set and scores are independent of node labeling.
  // Enumeration order (the tie-break for equal scores) follows g.dst/g.src.
  std::vector<int> cd, cs;
  for (std::size_t e = 0; e < g.dst.size(); ++e) {
    if (g.dst[e] != g.src[e]) {
      cd.push_back(g.dst[e]);
      cs.push_back(g.src[e]);
    }
  }
  const int n_edges = static_cast<int>(cd.size());

  ValueRef sigma;  // E x 1 contraction gates
  std::vector<double> raw_scores;
  if (n_edges > 0) {
    auto s_dst = t.matmul(v, t.param(prefix + ".w_dst", p.w_dst));
    auto s_src = t.matmul(v, t.param(prefix + ".w_src", p.w_src));
    auto raw = t.add_row(t.edge_pair_sum(s_dst, s_src, cd, cs),
                         t.param(prefix + ".b", p.b));
    sigma = t.sigmoid(raw);
    const Tensor2& rv = t.value(raw);
    raw_scores.assign(rv.data(), rv.data() + rv.size());
  }

  // Greedy maximal matching, high score first.
  std::vector<int> order(static_cast<std::size_t>(n_edges));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return raw_scores[static_cast<std::size_t>(a)] >
           raw_scores[static_cast<std::size_t>(b)];
  });
  std::vector<int> match_edge(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (int e : order) {
    const int a = cd[static_cast<std::size_t>(e)];
    const int b = cs[static_cast<std::size_t>(e)];
    if (used[static_cast<std::size_t>(a)] || used[static_cast<std::size_t>(b)]) continue;
    used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(b)] = true;
    match_edge[static_cast<std::size_t>(a)] = e;
    match_edge[static_cast<std::size_t>(b)] = e;
  }

  // Clusters ordered by smallest member, so relabeling a graph relabels the
  // clusters consistently.
  PoolResult out;
  out.cluster_of.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> members;
  std::vector<int> offsets{0};
  std::vector<int> scale_src;  // index into [sigma ; ones]
  int singletons = 0;
  for (int m = 0; m < n; ++m) {
    if (out.cluster_of[static_cast<std::size_t>(m)] >= 0) continue;
    const int c = static_cast<int>(offsets.size()) - 1;
    out.cluster_of[static_cast<std::size_t>(m)] = c;
    members.push_back(m);
    const int e = match_edge[static_cast<std::size_t>(m)];
    if (e >= 0) {
      const int other = cd[static_cast<std::size_t>(e)] == m
                            ? cs[static_cast<std::size_t>(e)]
                            : cd[static_cast<std::size_t>(e)];
      out.cluster_of[static_cast<std::size_t>(other)] = c;
      members.push_back(other);
      scale_src.push_back(e);
    } else {
      scale_src.push_back(n_edges + singletons);
      ++singletons;
    }
    offsets.push_back(static_cast<int>(members.size()));
  }
  const int n_clusters = static_cast<int>(offsets.size()) - 1;

  // Per-cluster gate: sigmoid(score) for contracted pairs, exactly 1 for
  // pass-through singletons.
  ValueRef gates;
  if (singletons > 0) {
    Tensor2 ones(static_cast<std::size_t>(singletons), 1);
    ones.fill(1.0);
    auto ones_ref = t.constant(std::move(ones));
    gates = n_edges > 0 ? t.concat_rows({sigma, ones_ref}) : ones_ref;
  } else {
    gates = sigma;
  }
  auto scale = t.gather_rows(gates, scale_src);
  out.nodes = t.row_scale(t.group_sum_rows(v, members, offsets), scale);

  // Contracted adjacency: neighbor sets between distinct clusters.
  std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(n_clusters));
  for (std::size_t e = 0; e < g.dst.size(); ++e) {
    const int cd = out.cluster_of[static_cast<std::size_t>(g.dst[e])];
    const int cs = out.cluster_of[static_cast<std::size_t>(g.src[e])];
    if (cd != cs) nbrs[static_cast<std::size_t>(cd)].push_back(cs);
  }
  out.graph.n = n_clusters;
  out.graph.self_loops = g.self_loops;
  out.graph.seg.assign(static_cast<std::size_t>(n_clusters) + 1, 0);
  for (int c = 0; c < n_clusters; ++c) {
    auto& row = nbrs[static_cast<std::size_t>(c)];
    if (g.self_loops) row.push_back(c);
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    for (int s : row) {
      out.graph.dst.push_back(c);
      out.graph.src.push_back(s);
    }
    out.graph.seg[static_cast<std::size_t>(c) + 1] =
        static_cast<int>(out.graph.dst.size());
  }
  return out;
}

ValueRef readout(Tape& t, ValueRef v) {
  if (t.value(v).rows() == 0) throw Error("readout: empty node set");
  return t.concat_cols(t.mean_rows(v), t.max_rows(v));
}

VideoEmbedding video_embed(Tape& t, ValueRef v0, const GraphStructure& g,
                           const ModelParams& params) {
  VideoEmbedding out;
  ValueRef v = v0;
  GraphStructure cur = g;
  for (int l = 0; l < 3; ++l) {
    const std::string gp = "gat" + std::to_string(l + 1);
    const std::string pp = "pool" + std::to_string(l + 1);
    auto gat = gat_forward(t, v, cur, params.gat[static_cast<std::size_t>(l)], gp);
    out.attention[static_cast<std::size_t>(l)] = {cur.dst, cur.src, gat.attention};
    auto pooled =
        edge_pool(t, gat.nodes, cur, params.pool[static_cast<std::size_t>(l)], pp);
    out.cluster_of[static_cast<std::size_t>(l)] = pooled.cluster_of;
    v = pooled.nodes;
    cur = std::move(pooled.graph);
    out.h[static_cast<std::size_t>(l)] = readout(t, v);
  }
  out.video_feature = t.add(t.add(out.h[0], out.h[1]), out.h[2]);
  return out;
}

}  // namespace tvgd
