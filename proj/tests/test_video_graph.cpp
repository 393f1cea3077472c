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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tvgd/error.hpp"
#include "tvgd/rng.hpp"
#include "tvgd/video_graph.hpp"

using tvgd::build_video_graph;
using tvgd::EdgeKind;
using tvgd::FrameFeatureSequence;
using tvgd::Rng;
using tvgd::sample_frames;
using tvgd::Tensor2;
using tvgd::validate_graph;
using tvgd::VideoGraph;

namespace {

FrameFeatureSequence make_seq(Tensor2 frames) {
  FrameFeatureSequence s;
  s.video_id = "test";
  s.frames = std::move(frames);
  return s;
}

FrameFeatureSequence random_seq(Rng& rng, std::size_t t, std::size_t d) {
  Tensor2 f(t, d);
  for (std::size_t i = 0; i < f.size(); ++i) f.data()[i] = rng.uniform(-1, 1);
  return make_seq(std::move(f));
}

// Brute-force oracle: all T^2 distances, full per-node sort, same
// tie-break. Returns undirected non-loop edges with their kinds.
std::map<std::pair<int, int>, EdgeKind> oracle_edges(const Tensor2& f, int k) {
  const int t = static_cast<int>(f.rows());
  std::map<std::pair<int, int>, EdgeKind> edges;
  for (int m = 0; m + 1 < t; ++m) edges[{m, m + 1}] = EdgeKind::kTemporal;
  std::vector<std::vector<double>> d(static_cast<std::size_t>(t),
                                     std::vector<double>(static_cast<std::size_t>(t), 0.0));
  for (int m = 0; m < t; ++m) {
    for (int n = 0; n < t; ++n) {
      double s = 0.0;
      for (std::size_t j = 0; j < f.cols(); ++j) {
        const double diff = f.at(static_cast<std::size_t>(m), j) -
                            f.at(static_cast<std::size_t>(n), j);
        s += diff * diff;
      }
      d[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] = s;
    }
  }
  for (int m = 0; m < t; ++m) {
    std::vector<int> others;
    for (int n = 0; n < t; ++n) {
      if (n != m) others.push_back(n);
    }
    std::sort(others.begin(), others.end(), [&](int x, int y) {
      const double dx = d[static_cast<std::size_t>(m)][static_cast<std::size_t>(x)];
      const double dy = d[static_cast<std::size_t>(m)][static_cast<std::size_t>(y)];
      if (dx != dy) return dx < dy;
      return x < y;
    });
    const int take = std::min<int>(k, static_cast<int>(others.size()));
    for (int s = 0; s < take; ++s) {
      const int n = others[static_cast<std::size_t>(s)];
      const auto key = std::minmax(m, n);
      if (edges.count({key.first, key.second}) == 0) {
        edges[{key.first, key.second}] = EdgeKind::kSimilarity;
      }
    }
  }
  return edges;
}

std::map<std::pair<int, int>, EdgeKind> graph_edges(const VideoGraph& g) {
  std::map<std::pair<int, int>, EdgeKind> edges;
  const int t = static_cast<int>(g.node_count());
  for (int m = 0; m < t; ++m) {
    for (int e = g.nbr_offsets[static_cast<std::size_t>(m)];
         e < g.nbr_offsets[static_cast<std::size_t>(m) + 1]; ++e) {
      const int n = g.nbrs[static_cast<std::size_t>(e)];
      if (n <= m) continue;  // undirected, skip loops and duplicates
      edges[{m, n}] = g.kinds[static_cast<std::size_t>(e)];
    }
  }
  return edges;
}

}  // namespace

TEST_CASE("sample_frames with matching counts is the identity") {
  Rng rng(3);
  auto seq = random_seq(rng, 40, 3);
  auto out = sample_frames(seq, 40);
  CHECK(out.frames == seq.frames);
}

TEST_CASE("sample_frames follows the linspace-and-round oracle") {
  Rng rng(4);
  for (const auto& [t, n] : std::vector<std::pair<int, int>>{
           {80, 40}, {22, 40}, {1184, 40}, {7, 3}, {1, 5}, {40, 40}}) {
    auto seq = random_seq(rng, static_cast<std::size_t>(t), 2);
    auto out = sample_frames(seq, n);
    REQUIRE(static_cast<int>(out.frame_count()) == n);
    std::vector<std::size_t> want;
    for (int j = 0; j < n; ++j) {
      const double pos =
          n == 1 ? 0.0
                 : static_cast<double>(j) * (t - 1) / static_cast<double>(n - 1);
      want.push_back(static_cast<std::size_t>(std::llround(pos)));
    }
    // monotone, in range, endpoints present
    CHECK(want.front() == 0);
    CHECK(want.back() == static_cast<std::size_t>(n == 1 ? 0 : t - 1));
    CHECK(std::is_sorted(want.begin(), want.end()));
    for (int j = 0; j < n; ++j) {
      for (std::size_t c = 0; c < seq.dim(); ++c) {
        CHECK(out.frames.at(static_cast<std::size_t>(j), c) ==
              seq.frames.at(want[static_cast<std::size_t>(j)], c));
      }
    }
  }
  CHECK_THROWS_AS(sample_frames(random_seq(rng, 5, 2), 0), tvgd::Error);
}

TEST_CASE("hand-checked similarity graph: clustered 1-d features, k=1") {
  auto seq = make_seq(Tensor2::from_rows({{0.0}, {1.0}, {10.0}, {11.0}}));
  auto g = build_video_graph(seq, 1, /*self_loops=*/false);
  auto edges = graph_edges(g);
  REQUIRE(edges.size() == 3);  // union of temporal chain and {0-1, 2-3}
  CHECK(edges.at({0, 1}) == EdgeKind::kTemporal);
  CHECK(edges.at({1, 2}) == EdgeKind::kTemporal);
  CHECK(edges.at({2, 3}) == EdgeKind::kTemporal);
  CHECK(validate_graph(g).empty());
}

TEST_CASE("two frames with k=0 yield a single temporal edge") {
  auto seq = make_seq(Tensor2::from_rows({{1.0, 2.0}, {3.0, 4.0}}));
  auto g = build_video_graph(seq, 0);
  auto edges = graph_edges(g);
  REQUIRE(edges.size() == 1);
  CHECK(edges.at({0, 1}) == EdgeKind::kTemporal);
  CHECK(g.self_loops);
  CHECK(g.has_edge(0, 0));
  CHECK(g.edge_kind(0, 0) == EdgeKind::kSelfLoop);
}

TEST_CASE("random graphs match the brute-force oracle edge set exactly") {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const auto t = static_cast<std::size_t>(rng.uniform_int(1, 50));
    const auto d = static_cast<std::size_t>(rng.uniform_int(1, 8));
    const int k = static_cast<int>(rng.uniform_int(0, 6));
    auto seq = random_seq(rng, t, d);
    auto g = build_video_graph(seq, k);
    CHECK(validate_graph(g).empty());
    CHECK(graph_edges(g) == oracle_edges(seq.frames, k));
  }
}

TEST_CASE("similarity edges are invariant to positive feature scaling") {
  Rng rng(78);
  auto seq = random_seq(rng, 23, 5);
  auto g1 = build_video_graph(seq, 5);
  FrameFeatureSequence scaled = seq;
  for (std::size_t i = 0; i < scaled.frames.size(); ++i) {
    scaled.frames.data()[i] *= 37.5;
  }
  auto g2 = build_video_graph(scaled, 5);
  CHECK(graph_edges(g1) == graph_edges(g2));
}

TEST_CASE("k larger than T-1 connects to every other node") {
  Rng rng(79);
  auto seq = random_seq(rng, 4, 3);
  auto g = build_video_graph(seq, 10);
  auto edges = graph_edges(g);
  CHECK(edges.size() == 6);  // complete graph on 4 nodes
}

TEST_CASE("large graphs stay sparse and within the edge budget") {
  Rng rng(80);
  const std::size_t t = 600;
  const int k = 2;
  auto seq = random_seq(rng, t, 4);
  auto g = build_video_graph(seq, k);
  CHECK(validate_graph(g).empty());
  // per node: self loop + 2 temporal + at most 2k similarity entries
  CHECK(g.directed_edge_count() <= t * (2 * static_cast<std::size_t>(k) + 3));
  CHECK_THROWS_WITH_AS(g.dense_adjacency(), doctest::Contains("sparse"),
                       tvgd::Error);
}

TEST_CASE("validate_graph reports hand-broken invariants") {
  Rng rng(81);
  auto seq = random_seq(rng, 6, 3);
  auto g = build_video_graph(seq, 1);
  CHECK(validate_graph(g).empty());

  SUBCASE("asymmetric adjacency") {
    VideoGraph bad = g;
    // drop the last neighbor of node 0 (never its self-loop)
    const int cut = bad.nbr_offsets[1] - 1;
    bad.nbrs.erase(bad.nbrs.begin() + cut);
    bad.kinds.erase(bad.kinds.begin() + cut);
    for (std::size_t m = 1; m < bad.nbr_offsets.size(); ++m) bad.nbr_offsets[m]--;
    auto violations = validate_graph(bad);
    bool found = false;
    for (const auto& v : violations) {
      if (v.find("asymmetric") != std::string::npos) found = true;
    }
    CHECK(found);
  }

  SUBCASE("temporal chain broken") {
    VideoGraph bad = g;
    // relabel the 2-3 temporal edge (both directions) as similarity
    for (std::size_t m = 0; m < bad.node_count(); ++m) {
      for (int e = bad.nbr_offsets[m]; e < bad.nbr_offsets[m + 1]; ++e) {
        const int n = bad.nbrs[static_cast<std::size_t>(e)];
        if ((m == 2 && n == 3) || (m == 3 && n == 2)) {
          bad.kinds[static_cast<std::size_t>(e)] = EdgeKind::kSimilarity;
        }
      }
    }
    auto violations = validate_graph(bad);
    bool found = false;
    for (const auto& v : violations) {
      if (v.find("temporal chain") != std::string::npos) found = true;
    }
    CHECK(found);
  }

  SUBCASE("empty sequence rejected") {
    FrameFeatureSequence empty;
    CHECK_THROWS_AS(build_video_graph(empty, 5), tvgd::Error);
  }
}

TEST_CASE("single-frame video builds a self-loop-only graph") {
  auto seq = make_seq(Tensor2::from_rows({{1.0, 2.0, 3.0}}));
  auto g = build_video_graph(seq, 5);
  CHECK(g.node_count() == 1);
  CHECK(g.directed_edge_count() == 1);
  CHECK(g.edge_kind(0, 0) == EdgeKind::kSelfLoop);
  CHECK(validate_graph(g).empty());
}
