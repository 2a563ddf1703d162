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


#include "parasnet/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "parasnet/rng.hpp"

namespace parasnet::tsne {
namespace {

constexpr double kFloor = 1e-12;
constexpr int kMaxBisections = 200;

std::vector<double> squared_distances(const Points& x) {
  const std::size_t n = x.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < x[i].size(); ++k) {
        const double t = x[i][k] - x[j][k];
        s += t * t;
      }
      d[i * n + j] = d[j * n + i] = s;
    }
  return d;
}

// Student-t kernel values (1 + |yi - yj|^2)^-1 and their total.
std::vector<double> student_kernel(const Embedding& y, double& total) {
  const std::size_t n = y.size();
  std::vector<double> w(n * n, 0.0);
  total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = y[i][0] - y[j][0], dy = y[i][1] - y[j][1];
      const double v = 1.0 / (1.0 + dx * dx + dy * dy);
      w[i * n + j] = w[j * n + i] = v;
      total += 2.0 * v;
    }
  return w;
}

}  // namespace

std::vector<double> conditional_affinities(const std::vector<double>& dist2, std::size_t n,
                                           double perplexity, double tolerance) {
  const double target = std::log(perplexity);
  std::vector<double> p(n * n, 0.0);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* d = &dist2[i * n];
    // Shift by the nearest neighbour distance so exp() cannot underflow the
    // whole row; the shift cancels in the normalization.
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) dmin = std::min(dmin, d[j]);
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < kMaxBisections; ++it) {
      double sum = 0.0, weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = j == i ? 0.0 : std::exp(-beta * (d[j] - dmin));
        sum += row[j];
        weighted += row[j] * (d[j] - dmin);
      }
      const double entropy = std::log(sum) + beta * weighted / sum;
      for (std::size_t j = 0; j < n; ++j) p[i * n + j] = row[j] / sum;
      const double diff = entropy - target;
      if (std::abs(diff) < tolerance) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? 2.0 * beta : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
  }
  return p;
}

std::vector<double> joint_affinities(const std::vector<double>& conditional, std::size_t n) {
  std::vector<double> p(n * n, 0.0);
  const double denom = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      p[i * n + j] = std::max((conditional[i * n + j] + conditional[j * n + i]) / denom, kFloor);
    }
  return p;
}

double kl_divergence(const std::vector<double>& p, const Embedding& y) {
  const std::size_t n = y.size();
  double total = 0.0;
  const auto w = student_kernel(y, total);
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double pij = p[i * n + j];
      const double qij = std::max(w[i * n + j] / total, kFloor);
      kl += pij * std::log(pij / qij);
    }
  return kl;
}

Embedding kl_gradient(const std::vector<double>& p, const Embedding& y, double scale) {
  const std::size_t n = y.size();
  double total = 0.0;
  const auto w = student_kernel(y, total);
  Embedding g(n, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double wij = w[i * n + j];
      const double coeff = 4.0 * (scale * p[i * n + j] - wij / total) * wij;
      g[i][0] += coeff * (y[i][0] - y[j][0]);
      g[i][1] += coeff * (y[i][1] - y[j][1]);
    }
  }
  return g;
}

EmbeddingResult tsne_embed(const Points& x, const TsneConfig& cfg) {
  const std::size_t n = x.size();
  if (!(cfg.perplexity > 0.0)) throw std::invalid_argument("t-SNE: perplexity must be positive");
  if (static_cast<double>(n) < 3.0 * cfg.perplexity) {
    throw std::invalid_argument("t-SNE: need at least 3 * perplexity points, got " + std::to_string(n));
  }
  if (n > kMaxPoints) {
    throw std::invalid_argument("t-SNE: at most " + std::to_string(kMaxPoints) + " points, got " +
                                std::to_string(n));
  }
  for (const auto& row : x) {
    if (row.size() != x.front().size()) throw std::invalid_argument("t-SNE: ragged feature rows");
  }

  const auto p = joint_affinities(
      conditional_affinities(squared_distances(x), n, cfg.perplexity, cfg.entropy_tolerance), n);

  Rng rng(cfg.seed);
  Embedding y(n);
  for (auto& v : y) v = {1e-2 * rng.normal(), 1e-2 * rng.normal()};
  Embedding velocity(n, {0.0, 0.0}), gains(n, {1.0, 1.0});

  EmbeddingResult result;
  result.perplexity = cfg.perplexity;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    if (it == cfg.exaggeration_iterations) result.kl_after_exaggeration = kl_divergence(p, y);
    const double scale = it < cfg.exaggeration_iterations ? cfg.exaggeration : 1.0;
    const double momentum = it < cfg.momentum_switch ? cfg.initial_momentum : cfg.final_momentum;
    const Embedding g = kl_gradient(p, y, scale);
    for (std::size_t i = 0; i < n; ++i) {
      for (int d = 0; d < 2; ++d) {
        double& gain = gains[i][d];
        gain = (g[i][d] > 0.0) != (velocity[i][d] > 0.0) ? gain + 0.2 : gain * 0.8;
        gain = std::max(gain, 0.01);
        velocity[i][d] = momentum * velocity[i][d] - cfg.learning_rate * gain * g[i][d];
        y[i][d] += velocity[i][d];
      }
    }
    double mx = 0.0, my = 0.0;
    for (const auto& v : y) {
      mx += v[0];
      my += v[1];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (auto& v : y) {
      v[0] -= mx;
      v[1] -= my;
    }
  }
  if (cfg.iterations <= cfg.exaggeration_iterations) result.kl_after_exaggeration = kl_divergence(p, y);
  result.kl = kl_divergence(p, y);
  result.iterations = cfg.iterations;
  result.coords = std::move(y);
  return result;
}

double silhouette(const Embedding& y, const std::vector<int>& labels) {
  if (labels.size() != y.size()) throw std::invalid_argument("silhouette: label count mismatch");
  std::map<int, std::size_t> sizes;
  for (int l : labels) ++sizes[l];
  if (sizes.size() < 2) throw std::invalid_argument("silhouette: need at least two clusters");

  const std::size_t n = y.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (sizes[labels[i]] == 1) continue;
    std::map<int, double> sum;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[labels[j]] += std::hypot(y[i][0] - y[j][0], y[i][1] - y[j][1]);
    }
    const double a = sum[labels[i]] / static_cast<double>(sizes[labels[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, s] : sum) {
      if (label != labels[i]) b = std::min(b, s / static_cast<double>(sizes[label]));
    }
    const double m = std::max(a, b);
    total += m > 0.0 ? (b - a) / m : 0.0;
  }
  return total / static_cast<double>(n);
}

}  // namespace parasnet::tsne
