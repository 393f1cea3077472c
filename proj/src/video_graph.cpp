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

#include "tvgd/video_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "tvgd/error.hpp"

namespace tvgd {

namespace {

// Sequential scalar sum on purpose: neighbor selection compares these
// values, and a fixed accumulation order keeps the ranking reproducible
// against the brute-force test oracle.
double sqdist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

}  // namespace

const char* edge_kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::kTemporal: return "temporal";
    case EdgeKind::kSimilarity: return "similarity";
    case EdgeKind::kSelfLoop: return "self_loop";
  }
  return "?";
}

bool VideoGraph::has_edge(int m, int n) const {
  const auto lo = nbrs.begin() + nbr_offsets[static_cast<std::size_t>(m)];
  const auto hi = nbrs.begin() + nbr_offsets[static_cast<std::size_t>(m) + 1];
  return std::binary_search(lo, hi, n);
}

EdgeKind VideoGraph::edge_kind(int m, int n) const {
  const auto base = nbrs.begin();
  const auto lo = base + nbr_offsets[static_cast<std::size_t>(m)];
  const auto hi = base + nbr_offsets[static_cast<std::size_t>(m) + 1];
  const auto it = std::lower_bound(lo, hi, n);
  if (it == hi || *it != n) {
    throw Error("edge_kind: no edge (" + std::to_string(m) + ", " +
                std::to_string(n) + ")");
  }
  return kinds[static_cast<std::size_t>(it - base)];
}

Tensor2 VideoGraph::dense_adjacency() const {
  const std::size_t t = node_count();
  if (t > 512) {
    throw Error("dense_adjacency: refusing a dense " + std::to_string(t) + "x" +
                std::to_string(t) + " matrix; graphs above 512 nodes stay sparse");
  }
  Tensor2 a(t, t);
  for (std::size_t m = 0; m < t; ++m) {
    for (int e = nbr_offsets[m]; e < nbr_offsets[m + 1]; ++e) {
      a.at(m, static_cast<std::size_t>(nbrs[static_cast<std::size_t>(e)])) = 1.0;
    }
  }
  return a;
}

FrameFeatureSequence sample_frames(const FrameFeatureSequence& seq, int n) {
  if (n < 1) throw ValidationError("sample_frames: n must be >= 1");
  const std::size_t t = seq.frame_count();
  if (t < 1) throw ValidationError("sample_frames: empty sequence");
  FrameFeatureSequence out;
  out.video_id = seq.video_id;
  out.domain = seq.domain;
  out.label = seq.label;
  out.frames = Tensor2(static_cast<std::size_t>(n), seq.dim());
  for (int j = 0; j < n; ++j) {
    std::size_t idx = 0;
    if (n > 1) {
      const double pos = static_cast<double>(j) * static_cast<double>(t - 1) /
                         static_cast<double>(n - 1);
      idx = static_cast<std::size_t>(std::llround(pos));
    }
    std::memcpy(out.frames.row(static_cast<std::size_t>(j)), seq.frames.row(idx),
                seq.dim() * sizeof(double));
  }
  return out;
}

VideoGraph build_video_graph(const FrameFeatureSequence& seq, int k,
                             bool self_loops) {
  const std::size_t t = seq.frame_count();
  if (t < 1) throw ValidationError("build_video_graph: empty sequence");
  if (seq.dim() < 1) throw ValidationError("build_video_graph: zero feature dim");
  if (k < 0) throw ValidationError("build_video_graph: k must be >= 0");

  // Neighbor sets start from the temporal chain; similarity selections are
  // unioned in. kSimilarity never overwrites kTemporal.
  std::vector<std::vector<std::pair<int, EdgeKind>>> adj(t);
  for (std::size_t m = 0; m + 1 < t; ++m) {
    adj[m].emplace_back(static_cast<int>(m) + 1, EdgeKind::kTemporal);
    adj[m + 1].emplace_back(static_cast<int>(m), EdgeKind::kTemporal);
  }

  if (k > 0 && t > 1) {
    std::vector<double> dist(t);
    std::vector<int> order(t);
    for (std::size_t m = 0; m < t; ++m) {
      for (std::size_t j = 0; j < t; ++j) {
        dist[j] = sqdist(seq.frames.row(m), seq.frames.row(j), seq.dim());
      }
      int count = 0;
      for (std::size_t j = 0; j < t; ++j) {
        if (j != m) order[static_cast<std::size_t>(count++)] = static_cast<int>(j);
      }
      const int take = std::min(k, count);
      std::partial_sort(order.begin(), order.begin() + take,
                        order.begin() + count, [&](int x, int y) {
                          if (dist[static_cast<std::size_t>(x)] !=
                              dist[static_cast<std::size_t>(y)]) {
                            return dist[static_cast<std::size_t>(x)] <
                                   dist[static_cast<std::size_t>(y)];
                          }
                          return x < y;  // deterministic tie-break
                        });
      for (int s = 0; s < take; ++s) {
        const int n = order[static_cast<std::size_t>(s)];
        adj[m].emplace_back(n, EdgeKind::kSimilarity);
        adj[static_cast<std::size_t>(n)].emplace_back(static_cast<int>(m),
                                                      EdgeKind::kSimilarity);
      }
    }
  }

  if (self_loops) {
    for (std::size_t m = 0; m < t; ++m) {
      adj[m].emplace_back(static_cast<int>(m), EdgeKind::kSelfLoop);
    }
  }

  VideoGraph g;
  g.node_features = seq.frames;
  g.k_similarity = k;
  g.self_loops = self_loops;
  g.nbr_offsets.assign(t + 1, 0);
  for (std::size_t m = 0; m < t; ++m) {
    auto& row = adj[m];
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      // kTemporal < kSimilarity < kSelfLoop, so temporal wins on duplicates
      return static_cast<int>(a.second) < static_cast<int>(b.second);
    });
    row.erase(std::unique(row.begin(), row.end(),
                          [](const auto& a, const auto& b) {
                            return a.first == b.first;
                          }),
              row.end());
    g.nbr_offsets[m + 1] = g.nbr_offsets[m] + static_cast<int>(row.size());
  }
  g.nbrs.reserve(static_cast<std::size_t>(g.nbr_offsets[t]));
  g.kinds.reserve(static_cast<std::size_t>(g.nbr_offsets[t]));
  for (std::size_t m = 0; m < t; ++m) {
    for (const auto& [n, kind] : adj[m]) {
      g.nbrs.push_back(n);
      g.kinds.push_back(kind);
    }
  }
  return g;
}

std::vector<std::string> validate_graph(const VideoGraph& g) {
  std::vector<std::string> out;
  const std::size_t t = g.node_count();
  if (g.nbr_offsets.size() != t + 1 ||
      (t > 0 && g.nbr_offsets.back() != static_cast<int>(g.nbrs.size())) ||
      g.kinds.size() != g.nbrs.size()) {
    out.push_back("malformed CSR arrays");
    return out;  // structural checks below would read out of range
  }
  if (!g.node_features.all_finite()) out.push_back("non-finite node features");

  bool sorted = true;
  bool in_range = true;
  for (std::size_t m = 0; m < t; ++m) {
    for (int e = g.nbr_offsets[m]; e < g.nbr_offsets[m + 1]; ++e) {
      const int n = g.nbrs[static_cast<std::size_t>(e)];
      if (n < 0 || n >= static_cast<int>(t)) in_range = false;
      if (e > g.nbr_offsets[m] && g.nbrs[static_cast<std::size_t>(e - 1)] >= n) {
        sorted = false;
      }
    }
  }
  if (!in_range) {
    out.push_back("neighbor index out of range");
    return out;
  }
  if (!sorted) out.push_back("neighbor lists not sorted/unique");

  bool symmetric = true;
  bool kinds_match = true;
  for (std::size_t m = 0; m < t; ++m) {
    for (int e = g.nbr_offsets[m]; e < g.nbr_offsets[m + 1]; ++e) {
      const int n = g.nbrs[static_cast<std::size_t>(e)];
      if (n == static_cast<int>(m)) continue;
      if (!g.has_edge(n, static_cast<int>(m))) {
        symmetric = false;
      } else if (g.edge_kind(n, static_cast<int>(m)) !=
                 g.kinds[static_cast<std::size_t>(e)]) {
        kinds_match = false;
      }
    }
  }
  if (!symmetric) out.push_back("asymmetric adjacency");
  if (!kinds_match) out.push_back("edge kinds differ across directions");

  for (std::size_t m = 0; m < t; ++m) {
    const bool has_loop = g.has_edge(static_cast<int>(m), static_cast<int>(m));
    if (g.self_loops && !has_loop) {
      out.push_back("missing self-loop at node " + std::to_string(m));
      break;
    }
    if (!g.self_loops && has_loop) {
      out.push_back("unexpected self-loop at node " + std::to_string(m));
      break;
    }
  }

  bool chain_ok = true;
  for (std::size_t m = 0; m + 1 < t; ++m) {
    if (!g.has_edge(static_cast<int>(m), static_cast<int>(m) + 1) ||
        g.edge_kind(static_cast<int>(m), static_cast<int>(m) + 1) !=
            EdgeKind::kTemporal) {
      chain_ok = false;
      break;
    }
  }
  if (!chain_ok) out.push_back("temporal chain broken");

  std::size_t temporal_directed = 0;
  for (EdgeKind k : g.kinds) {
    if (k == EdgeKind::kTemporal) ++temporal_directed;
  }
  if (chain_ok && symmetric && temporal_directed != 2 * (t - (t > 0 ? 1 : 0))) {
    out.push_back("temporal edge count != T - 1 undirected");
  }

  for (std::size_t m = 0; m < t; ++m) {
    if (g.nbr_offsets[m + 1] == g.nbr_offsets[m]) {
      out.push_back("isolated node " + std::to_string(m));
      break;
    }
  }
  return out;
}

}  // namespace tvgd
