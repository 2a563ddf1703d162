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


// One-vs-rest linear SVMs with Platt-calibrated outputs, and a Gaussian naive
// Bayes model over the same feature vectors.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "parasnet/classes.hpp"

namespace parasnet::baseline {

using FeatureVector = std::vector<double>;

/// P(y = 1 | f) = 1 / (1 + exp(a * f + b)).
struct PlattSigmoid {
  double a = 0.0;
  double b = 0.0;

  double operator()(double score) const;
};

struct PlattFit {
  PlattSigmoid sigmoid;
  /// Negative log-likelihood (smoothed targets) before the first and after
  /// every accepted Newton step.
  std::vector<double> nll_history;
};

/// Damped Newton fit of the sigmoid to decision values and binary labels,
/// with the usual smoothed targets (N+ + 1) / (N+ + 2) and 1 / (N- + 2).
PlattFit fit_platt(const std::vector<double>& scores, const std::vector<bool>& positive,
                   std::size_t max_iterations = 100);

struct SvmConfig {
  double lambda = 1e-4;  // L2 regularization
  std::size_t epochs = 60;
  std::size_t calibration_folds = 3;
  std::uint64_t seed = 7;
};

/// Binary linear SVM trained by stochastic subgradient descent on
///   lambda/2 |(w, b)|^2 + mean_i max(0, 1 - y_i (w.x_i + b))
/// with step 1 / (lambda t) and projection onto the ball of radius
/// 1 / sqrt(lambda). The bias is learned as the weight of a constant feature.
struct LinearSvm {
  std::vector<double> weights;
  double bias = 0.0;

  double decision(const FeatureVector& x) const;
};

LinearSvm train_linear_svm(const std::vector<FeatureVector>& x, const std::vector<bool>& positive,
                           const SvmConfig& cfg, std::uint64_t stream);

struct ScoredSvmModel {
  std::vector<LinearSvm> machines;       // one per class, class order
  std::vector<PlattSigmoid> calibration;  // one per class

  bool trained() const noexcept { return machines.size() == kNumClasses; }
  /// Calibrated one-vs-rest probabilities normalized to sum to one.
  std::array<double, kNumClasses> predict_proba(const FeatureVector& x) const;
};

/// Platt parameters are fitted on out-of-fold decision values
/// (cfg.calibration_folds folds); the returned machines use all data.
/// Throws std::invalid_argument unless at least two classes are present.
ScoredSvmModel train_scored_svm(const std::vector<FeatureVector>& x,
                                const std::vector<ClassLabel>& labels, const SvmConfig& cfg);

struct GaussianNaiveBayes {
  std::vector<double> log_prior;            // per class
  std::vector<std::vector<double>> mean;    // class x feature
  std::vector<std::vector<double>> variance;

  bool trained() const noexcept { return log_prior.size() == kNumClasses; }
  std::array<double, kNumClasses> log_posterior(const FeatureVector& x) const;
};

/// Per-class feature means and variances; every variance is increased by
/// 1e-9 times the largest feature variance (absent classes get prior 0).
GaussianNaiveBayes train_naive_bayes(const std::vector<FeatureVector>& x,
                                     const std::vector<ClassLabel>& labels);

}  // namespace parasnet::baseline
