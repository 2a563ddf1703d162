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


// Bag of visual words: a k-means codebook over SIFT descriptors and hard-
// assignment histograms.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "parasnet/baseline/sift.hpp"

namespace parasnet::baseline {

struct KMeansConfig {
  std::size_t k = 64;
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;  // relative objective change
  std::uint64_t seed = 7;
};

struct BowCodebook {
  std::vector<Descriptor> centroids;
  /// Sum of squared distances after seeding and after every Lloyd iteration.
  std::vector<double> objective_history;

  std::size_t k() const noexcept { return centroids.size(); }
  std::size_t nearest(const Descriptor& d) const;
};

/// Lloyd iterations from k-means++ seeding. Throws std::invalid_argument when
/// fewer than k descriptors are given or k < 2.
BowCodebook build_codebook(std::span<const Descriptor> descriptors, const KMeansConfig& cfg);

struct BowHistogram {
  std::vector<double> bins;  // L1-normalized, or all zero
  bool no_keypoints = false;
};

BowHistogram bow_histogram(std::span<const Descriptor> descriptors, const BowCodebook& codebook);

}  // namespace parasnet::baseline
