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


#include "parasnet/baseline/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "parasnet/rng.hpp"

namespace parasnet::baseline {
namespace {

double platt_nll(const std::vector<double>& f, const std::vector<double>& t, double a, double b) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double z = f[i] * a + b;
    s += z >= 0.0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
  }
  return s;
}

}  // namespace

double PlattSigmoid::operator()(double score) const {
  const double z = a * score + b;
  return z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

PlattFit fit_platt(const std::vector<double>& scores, const std::vector<bool>& positive,
                   std::size_t max_iterations) {
  if (scores.size() != positive.size() || scores.empty()) {
    throw std::invalid_argument("fit_platt: need equally many scores and labels");
  }
  const double n_pos = static_cast<double>(std::count(positive.begin(), positive.end(), true));
  const double n_neg = static_cast<double>(positive.size()) - n_pos;
  const double hi = (n_pos + 1.0) / (n_pos + 2.0), lo = 1.0 / (n_neg + 2.0);
  std::vector<double> t(scores.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = positive[i] ? hi : lo;

  constexpr double kMinStep = 1e-10, kSigma = 1e-12, kEps = 1e-5;
  PlattFit fit;
  double a = 0.0, b = std::log((n_neg + 1.0) / (n_pos + 1.0));
  double fval = platt_nll(scores, t, a, b);
  fit.nll_history.push_back(fval);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double z = scores[i] * a + b;
      double p, q;  // p = P(y=1), q = 1 - p
      if (z >= 0.0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += scores[i] * scores[i] * d2;
      h22 += d2;
      h21 += scores[i] * d2;
      const double d1 = t[i] - p;
      g1 += scores[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    bool accepted = false;
    while (step >= kMinStep) {
      const double na = a + step * da, nb = b + step * db;
      const double nf = platt_nll(scores, t, na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    if (!accepted) break;
    fit.nll_history.push_back(fval);
  }
  fit.sigmoid = {a, b};
  return fit;
}

double LinearSvm::decision(const FeatureVector& x) const {
  if (x.size() != weights.size()) {
    throw std::invalid_argument("LinearSvm: feature length " + std::to_string(x.size()) +
                                " != " + std::to_string(weights.size()));
  }
  double s = bias;
  for (std::size_t i = 0; i < x.size(); ++i) s += weights[i] * x[i];
  return s;
}

LinearSvm train_linear_svm(const std::vector<FeatureVector>& x, const std::vector<bool>& positive,
                           const SvmConfig& cfg, std::uint64_t stream) {
  if (x.empty() || x.size() != positive.size()) {
    throw std::invalid_argument("train_linear_svm: need equally many samples and labels");
  }
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("train_linear_svm: lambda must be positive");
  const std::size_t dim = x.front().size();
  // The last component is the bias.
  std::vector<double> w(dim + 1, 0.0);
  std::vector<std::size_t> order(x.size());
  const double radius = 1.0 / std::sqrt(cfg.lambda);
  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, {stream, epoch}));
    rng.shuffle(order.begin(), order.end());
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
      const double y = positive[i] ? 1.0 : -1.0;
      double margin = w[dim];
      for (std::size_t e = 0; e < dim; ++e) margin += w[e] * x[i][e];
      const double shrink = 1.0 - eta * cfg.lambda;
      for (double& v : w) v *= shrink;
      if (y * margin < 1.0) {
        for (std::size_t e = 0; e < dim; ++e) w[e] += eta * y * x[i][e];
        w[dim] += eta * y;
      }
      double norm = 0.0;
      for (double v : w) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > radius) {
        for (double& v : w) v *= radius / norm;
      }
    }
  }
  LinearSvm svm;
  svm.bias = w[dim];
  w.pop_back();
  svm.weights = std::move(w);
  return svm;
}

std::array<double, kNumClasses> ScoredSvmModel::predict_proba(const FeatureVector& x) const {
  if (!trained()) throw std::logic_error("ScoredSvmModel: not trained");
  std::array<double, kNumClasses> p{};
  double sum = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    p[c] = calibration[c](machines[c].decision(x));
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return p;
}

ScoredSvmModel train_scored_svm(const std::vector<FeatureVector>& x,
                                const std::vector<ClassLabel>& labels, const SvmConfig& cfg) {
  if (x.size() != labels.size() || x.empty()) {
    throw std::invalid_argument("train_scored_svm: need equally many samples and labels");
  }
  std::array<std::size_t, kNumClasses> counts{};
  for (ClassLabel l : labels) ++counts[class_index(l)];
  if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) < 2) {
    throw std::invalid_argument("train_scored_svm: at least two classes are required");
  }
  const std::size_t folds = std::clamp<std::size_t>(cfg.calibration_folds, 2, x.size());
  std::vector<std::size_t> fold_of(x.size());
  {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, {0x464f4c44}));  // "FOLD"
    rng.shuffle(order.begin(), order.end());
    for (std::size_t i = 0; i < order.size(); ++i) fold_of[order[i]] = i % folds;
  }

  ScoredSvmModel model;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::vector<bool> pos(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) pos[i] = class_index(labels[i]) == c;
    std::vector<double> oof(x.size());
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<FeatureVector> xs;
      std::vector<bool> ys;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (fold_of[i] != f) {
          xs.push_back(x[i]);
          ys.push_back(pos[i]);
        }
      }
      const LinearSvm m = train_linear_svm(xs, ys, cfg, 16 * c + f + 1);
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (fold_of[i] == f) oof[i] = m.decision(x[i]);
      }
    }
    model.calibration.push_back(fit_platt(oof, pos).sigmoid);
    model.machines.push_back(train_linear_svm(x, pos, cfg, 16 * c));
  }
  return model;
}

std::array<double, kNumClasses> GaussianNaiveBayes::log_posterior(const FeatureVector& x) const {
  if (!trained()) throw std::logic_error("GaussianNaiveBayes: not trained");
  std::array<double, kNumClasses> lp{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (x.size() != mean[c].size()) throw std::invalid_argument("GaussianNaiveBayes: feature length mismatch");
    double s = log_prior[c];
    for (std::size_t e = 0; e < x.size(); ++e) {
      const double d = x[e] - mean[c][e];
      s -= 0.5 * std::log(2.0 * std::numbers::pi * variance[c][e]) + d * d / (2.0 * variance[c][e]);
    }
    lp[c] = s;
  }
  const double top = *std::max_element(lp.begin(), lp.end());
  double z = 0.0;
  for (double v : lp) z += std::exp(v - top);
  const double log_z = top + std::log(z);
  for (double& v : lp) v -= log_z;
  return lp;
}

GaussianNaiveBayes train_naive_bayes(const std::vector<FeatureVector>& x,
                                     const std::vector<ClassLabel>& labels) {
  if (x.size() != labels.size() || x.empty()) {
    throw std::invalid_argument("train_naive_bayes: need equally many samples and labels");
  }
  const std::size_t dim = x.front().size();
  GaussianNaiveBayes nb;
  nb.mean.assign(kNumClasses, std::vector<double>(dim, 0.0));
  nb.variance.assign(kNumClasses, std::vector<double>(dim, 0.0));
  std::array<double, kNumClasses> n{};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t c = class_index(labels[i]);
    ++n[c];
    for (std::size_t e = 0; e < dim; ++e) nb.mean[c][e] += x[i][e];
  }
  for (std::size_t c = 0; c < kNumClasses; ++c)
    for (double& m : nb.mean[c]) m = n[c] > 0 ? m / n[c] : 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t c = class_index(labels[i]);
    for (std::size_t e = 0; e < dim; ++e) {
      const double d = x[i][e] - nb.mean[c][e];
      nb.variance[c][e] += d * d;
    }
  }
  // Floor relative to the largest variance of any feature over all samples.
  double max_var = 0.0;
  for (std::size_t e = 0; e < dim; ++e) {
    double m = 0.0, q = 0.0;
    for (const auto& xi : x) m += xi[e];
    m /= static_cast<double>(x.size());
    for (const auto& xi : x) q += (xi[e] - m) * (xi[e] - m);
    max_var = std::max(max_var, q / static_cast<double>(x.size()));
  }
  const double floor = std::max(1e-9 * max_var, 1e-300);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    for (double& v : nb.variance[c]) v = (n[c] > 0 ? v / n[c] : 0.0) + floor;
    nb.log_prior.push_back(n[c] > 0 ? std::log(n[c] / static_cast<double>(x.size()))
                                    : -std::numeric_limits<double>::infinity());
  }
  return nb;
}

}  // namespace parasnet::baseline
