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


// Exact O(N^2) t-SNE and the silhouette score used to grade embeddings.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace parasnet::tsne {

using Points = std::vector<std::vector<double>>;
using Embedding = std::vector<std::array<double, 2>>;

struct TsneConfig {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  std::uint64_t seed = 7;
  double learning_rate = 200.0;
  double exaggeration = 4.0;
  std::size_t exaggeration_iterations = 100;
  std::size_t momentum_switch = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  /// Entropy tolerance (nats) for the per-point bandwidth search.
  double entropy_tolerance = 1e-4;
};

inline constexpr std::size_t kMaxPoints = 5000;

struct EmbeddingResult {
  Embedding coords;
  double kl = 0.0;                       // KL(P || Q) at the end
  double kl_after_exaggeration = 0.0;    // first iteration without exaggeration
  std::size_t iterations = 0;
  double perplexity = 0.0;
};

/// Row-stochastic conditional affinities p_{j|i} from squared distances (row
/// major, N x N). Each row's entropy matches log(perplexity) to `tolerance`.
std::vector<double> conditional_affinities(const std::vector<double>& dist2, std::size_t n,
                                           double perplexity, double tolerance = 1e-4);

/// (P + P^T) / 2N, floored at 1e-12.
std::vector<double> joint_affinities(const std::vector<double>& conditional, std::size_t n);

/// KL(P || Q) for the Student-t similarities of `y`.
double kl_divergence(const std::vector<double>& p, const Embedding& y);

/// dKL/dy; `scale` multiplies P (early exaggeration).
Embedding kl_gradient(const std::vector<double>& p, const Embedding& y, double scale = 1.0);

/// Throws std::invalid_argument unless 3 * perplexity <= N <= kMaxPoints and
/// all rows share one dimension.
EmbeddingResult tsne_embed(const Points& x, const TsneConfig& cfg = {});

/// Mean silhouette over all points (Euclidean); singleton clusters score 0.
/// Throws std::invalid_argument for fewer than two clusters.
double silhouette(const Embedding& y, const std::vector<int>& labels);

}  // namespace parasnet::tsne
