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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "tvgd/error.hpp"
#include "tvgd/rng.hpp"
#include "tvgd/synth.hpp"
#include "tvgd/vgf.hpp"

using tvgd::Dataset;
using tvgd::Domain;
using tvgd::gen_synthetic;
using tvgd::Rng;
using tvgd::SynthConfig;
using tvgd::Tensor2;

namespace {

bool frames_equal(const Dataset& a, const Dataset& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].label != b[i].label) return false;
    if (!(a[i].frames == b[i].frames)) return false;
  }
  return true;
}

// Multinomial logistic regression on mean-pooled frames; the independent
// linear-probe oracle for the synthetic shift.
struct Probe {
  std::vector<double> w;  // d x k
  std::vector<double> b;  // k
  std::vector<double> mu, sigma;
  int d = 0, k = 0;
};

std::vector<double> pooled(const tvgd::FrameFeatureSequence& v) {
  std::vector<double> x(v.dim(), 0.0);
  for (std::size_t f = 0; f < v.frame_count(); ++f) {
    for (std::size_t c = 0; c < v.dim(); ++c) x[c] += v.frames.at(f, c);
  }
  for (auto& e : x) e /= static_cast<double>(v.frame_count());
  return x;
}

Probe fit_probe(const Dataset& train, int n_classes, int iters = 300,
                double lr = 0.5) {
  Probe p;
  p.d = static_cast<int>(train[0].dim());
  p.k = n_classes;
  const std::size_t n = train.size();
  std::vector<std::vector<double>> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = pooled(train[i]);
  p.mu.assign(static_cast<std::size_t>(p.d), 0.0);
  p.sigma.assign(static_cast<std::size_t>(p.d), 0.0);
  for (const auto& x : xs) {
    for (int c = 0; c < p.d; ++c) p.mu[static_cast<std::size_t>(c)] += x[static_cast<std::size_t>(c)];
  }
  for (auto& m : p.mu) m /= static_cast<double>(n);
  for (const auto& x : xs) {
    for (int c = 0; c < p.d; ++c) {
      const double dlt = x[static_cast<std::size_t>(c)] - p.mu[static_cast<std::size_t>(c)];
      p.sigma[static_cast<std::size_t>(c)] += dlt * dlt;
    }
  }
  for (auto& s : p.sigma) s = std::sqrt(s / static_cast<double>(n)) + 1e-9;
  for (auto& x : xs) {
    for (int c = 0; c < p.d; ++c) {
      x[static_cast<std::size_t>(c)] = (x[static_cast<std::size_t>(c)] -
                                        p.mu[static_cast<std::size_t>(c)]) /
                                       p.sigma[static_cast<std::size_t>(c)];
    }
  }
  p.w.assign(static_cast<std::size_t>(p.d) * static_cast<std::size_t>(p.k), 0.0);
  p.b.assign(static_cast<std::size_t>(p.k), 0.0);
  std::vector<double> logits(static_cast<std::size_t>(p.k));
  std::vector<double> gw(p.w.size()), gb(p.b.size());
  for (int it = 0; it < iters; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < p.k; ++c) {
        double acc = p.b[static_cast<std::size_t>(c)];
        for (int j = 0; j < p.d; ++j) {
          acc += xs[i][static_cast<std::size_t>(j)] *
                 p.w[static_cast<std::size_t>(j) * static_cast<std::size_t>(p.k) +
                     static_cast<std::size_t>(c)];
        }
        logits[static_cast<std::size_t>(c)] = acc;
      }
      double mx = logits[0];
      for (double l : logits) mx = std::max(mx, l);
      double denom = 0.0;
      for (int c = 0; c < p.k; ++c) denom += std::exp(logits[static_cast<std::size_t>(c)] - mx);
      for (int c = 0; c < p.k; ++c) {
        const double prob = std::exp(logits[static_cast<std::size_t>(c)] - mx) / denom;
        const double g = (prob - (c == train[i].label ? 1.0 : 0.0)) /
                         static_cast<double>(n);
        gb[static_cast<std::size_t>(c)] += g;
        for (int j = 0; j < p.d; ++j) {
          gw[static_cast<std::size_t>(j) * static_cast<std::size_t>(p.k) +
             static_cast<std::size_t>(c)] += g * xs[i][static_cast<std::size_t>(j)];
        }
      }
    }
    for (std::size_t j = 0; j < p.w.size(); ++j) p.w[j] -= lr * gw[j];
    for (std::size_t j = 0; j < p.b.size(); ++j) p.b[j] -= lr * gb[j];
  }
  return p;
}

double probe_accuracy(const Probe& p, const Dataset& data) {
  std::size_t correct = 0;
  for (const auto& v : data) {
    auto x = pooled(v);
    for (int c = 0; c < p.d; ++c) {
      x[static_cast<std::size_t>(c)] =
          (x[static_cast<std::size_t>(c)] - p.mu[static_cast<std::size_t>(c)]) /
          p.sigma[static_cast<std::size_t>(c)];
    }
    int best = 0;
    double best_val = -1e300;
    for (int c = 0; c < p.k; ++c) {
      double acc = p.b[static_cast<std::size_t>(c)];
      for (int j = 0; j < p.d; ++j) {
        acc += x[static_cast<std::size_t>(j)] *
               p.w[static_cast<std::size_t>(j) * static_cast<std::size_t>(p.k) +
                   static_cast<std::size_t>(c)];
      }
      if (acc > best_val) {
        best_val = acc;
        best = c;
      }
    }
    if (best == v.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("gen_synthetic is deterministic per seed") {
  SynthConfig cfg;
  cfg.videos_per_class = 4;
  auto a = gen_synthetic(cfg);
  auto b = gen_synthetic(cfg);
  CHECK(frames_equal(a.source, b.source));
  CHECK(frames_equal(a.target, b.target));
  cfg.seed = 2;
  auto c = gen_synthetic(cfg);
  CHECK(!frames_equal(a.source, c.source));
}

TEST_CASE("generated frame counts stay in [t_min, t_max]") {
  SynthConfig cfg;
  cfg.videos_per_class = 6;
  cfg.t_min = 22;
  cfg.t_max = 120;
  auto data = gen_synthetic(cfg);
  for (const auto* ds : {&data.source, &data.target}) {
    for (const auto& v : *ds) {
      CHECK(v.frame_count() >= 22);
      CHECK(v.frame_count() <= 120);
    }
  }
}

TEST_CASE("zero transform strength and equal offsets collapse the domains") {
  SynthConfig cfg;
  cfg.videos_per_class = 3;
  cfg.transform_strength = 0.0;
  cfg.source_offset_frac = 0.3;
  cfg.target_offset_frac = 0.3;
  auto data = gen_synthetic(cfg);
  CHECK(frames_equal(data.source, data.target));
}

TEST_CASE("default shift: probe separates source but drops on target") {
  SynthConfig cfg;  // defaults: 6 classes x 40 videos per domain
  auto data = gen_synthetic(cfg);
  auto probe = fit_probe(data.source, cfg.n_classes);
  const double src_acc = probe_accuracy(probe, data.source);
  const double tgt_acc = probe_accuracy(probe, data.target);
  MESSAGE("probe source acc " << src_acc << ", target acc " << tgt_acc);
  CHECK(src_acc >= 0.95);
  CHECK(tgt_acc <= src_acc - 0.15);
}

TEST_CASE("vgf round trip is lossless at 32-bit precision") {
  SynthConfig cfg;
  cfg.videos_per_class = 2;
  cfg.t_min = 3;
  cfg.t_max = 9;
  auto data = gen_synthetic(cfg);
  const std::string path = temp_path("tvgd_roundtrip.vgf");
  tvgd::write_features(data.source, path);
  auto back = tvgd::read_features(path, Domain::kSource);
  REQUIRE(back.size() == data.source.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].label == data.source[i].label);
    REQUIRE(back[i].frames.same_shape(data.source[i].frames));
    for (std::size_t j = 0; j < back[i].frames.size(); ++j) {
      CHECK(back[i].frames.data()[j] ==
            static_cast<double>(static_cast<float>(data.source[i].frames.data()[j])));
    }
  }
  // a second trip through is bitwise stable
  tvgd::write_features(back, path);
  auto again = tvgd::read_features(path, Domain::kSource);
  CHECK(frames_equal(back, again));
  std::remove(path.c_str());
}

TEST_CASE("vgf rejects bad magic with a named error") {
  auto bytes = tvgd::encode_features({});
  bytes[0] = 'X';
  bytes[1] = 'X';
  CHECK_THROWS_WITH_AS(tvgd::decode_features(bytes, "buf", Domain::kSource),
                       doctest::Contains("not a VGF1 file"), tvgd::Error);
}

TEST_CASE("vgf names the record on a truncated payload") {
  SynthConfig cfg;
  cfg.n_classes = 2;
  cfg.videos_per_class = 1;
  cfg.t_min = 5;
  cfg.t_max = 10;
  auto data = gen_synthetic(cfg);
  auto bytes = tvgd::encode_features(data.source);
  bytes.resize(bytes.size() - 13);  // cut into the last record's payload
  CHECK_THROWS_WITH_AS(tvgd::decode_features(bytes, "buf", Domain::kSource),
                       doctest::Contains("video 1"), tvgd::Error);
}

TEST_CASE("vgf fuzz: truncations and corruptions never crash") {
  SynthConfig cfg;
  cfg.n_classes = 3;
  cfg.videos_per_class = 2;
  cfg.t_min = 4;
  cfg.t_max = 12;
  cfg.feature_dim = 6;
  auto data = gen_synthetic(cfg);
  auto bytes = tvgd::encode_features(data.source);
  Rng rng(4242);
  int threw = 0;
  const int cases = 300;
  for (int i = 0; i < cases; ++i) {
    auto mutated = bytes;
    if (i % 2 == 0) {
      mutated.resize(static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(bytes.size()) - 1)));
    } else {
      for (int flips = 0; flips < 4; ++flips) {
        const auto pos = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(mutated.size()) - 1));
        mutated[pos] = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
      }
    }
    try {
      auto ds = tvgd::decode_features(mutated, "fuzz", Domain::kSource);
      // accepted: structure still accounted for every byte
      for (const auto& v : ds) CHECK(v.frames.size() > 0);
    } catch (const tvgd::Error& e) {
      ++threw;
      CHECK(std::string(e.what()).size() > 10);  // carries a named message
    }
  }
  CHECK(threw > cases / 4);  // truncations alone guarantee plenty of errors
}
