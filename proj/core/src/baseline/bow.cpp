// Copyright 2026 The ParasNet Authors. All Rights Reserved.
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


#include "parasnet/baseline/bow.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "parasnet/rng.hpp"

namespace parasnet::baseline {
namespace {

double squared_distance(const Descriptor& a, const Descriptor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

std::size_t BowCodebook::nearest(const Descriptor& d) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double dist = squared_distance(d, centroids[c]);
    if (dist < best_d) {
      best_d = dist;
      best = c;
    }
  }
  return best;
}

BowCodebook build_codebook(std::span<const Descriptor> descriptors, const KMeansConfig& cfg) {
  const std::size_t n = descriptors.size(), k = cfg.k;
  if (k < 2) throw std::invalid_argument("build_codebook: k must be at least 2");
  if (n < k) {
    throw std::invalid_argument("build_codebook: " + std::to_string(n) +
                                " descriptors cannot form " + std::to_string(k) + " clusters");
  }
  Rng rng(cfg.seed);
  BowCodebook cb;
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  cb.centroids.push_back(descriptors[rng.below(n)]);
  while (cb.centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(descriptors[i], cb.centroids.back()));
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (pick = 0; pick + 1 < n; ++pick) {
        target -= d2[pick];
        if (target < 0.0 && d2[pick] > 0.0) break;
      }
    } else {
      pick = rng.below(n);
    }
    cb.centroids.push_back(descriptors[pick]);
  }

  std::vector<std::size_t> assign(n);
  auto assign_all = [&] {
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      assign[i] = cb.nearest(descriptors[i]);
      obj += squared_distance(descriptors[i], cb.centroids[assign[i]]);
    }
    return obj;
  };
  double obj = assign_all();
  cb.objective_history.push_back(obj);
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    std::vector<Descriptor> sums(k, Descriptor{});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[assign[i]];
      for (std::size_t e = 0; e < s.size(); ++e) s[e] += descriptors[i][e];
      ++counts[assign[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // an empty cluster keeps its centroid
      for (std::size_t e = 0; e < sums[c].size(); ++e) {
        cb.centroids[c][e] = sums[c][e] / static_cast<double>(counts[c]);
      }
    }
    const double next = assign_all();
    cb.objective_history.push_back(next);
    const bool done = obj - next <= cfg.tolerance * std::max(obj, 1e-300);
    obj = next;
    if (done) break;
  }
  return cb;
}

BowHistogram bow_histogram(std::span<const Descriptor> descriptors, const BowCodebook& codebook) {
  BowHistogram h;
  h.bins.assign(codebook.k(), 0.0);
  if (descriptors.empty()) {
    h.no_keypoints = true;
    return h;
  }
  for (const auto& d : descriptors) h.bins[codebook.nearest(d)] += 1.0;
  for (double& v : h.bins) v /= static_cast<double>(descriptors.size());
  return h;
}

}  // namespace parasnet::baseline
