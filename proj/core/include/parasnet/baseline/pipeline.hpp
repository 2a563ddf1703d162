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


// The complete hand-crafted classifier: preprocess, SIFT, bag of words,
// calibrated SVM, and a naive Bayes second opinion for close calls.
//
// Model file layout (little-endian):
//
//   "PBSL"                  4-byte magic
//   u32 version             currently 1
//   f64 contrast_threshold, f64 edge_ratio, u64 max_keypoints, f64 nb_gap
//   u32 k, u32 dim          codebook size, descriptor length (128)
//   f64 x k x dim           centroids
//   per class: f64 x k weights, f64 bias, f64 platt_a, f64 platt_b
//   per class: f64 log_prior, f64 x k means, f64 x k variances

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "parasnet/baseline/bow.hpp"
#include "parasnet/baseline/sift.hpp"
#include "parasnet/baseline/svm.hpp"
#include "parasnet/classifier.hpp"
#include "parasnet/dataset.hpp"

namespace parasnet::baseline {

inline constexpr std::uint32_t kBaselineVersion = 1;

struct BaselineConfig {
  SiftConfig sift;
  KMeansConfig kmeans;
  SvmConfig svm;
  /// Descriptors drawn (seeded, without replacement) for k-means; 0 = all.
  std::size_t codebook_sample = 20000;
  /// Naive Bayes is consulted when the top two SVM probabilities differ by
  /// less than this.
  double nb_gap = 0.2;
};

struct BaselineModel {
  SiftConfig sift;
  double nb_gap = 0.2;
  BowCodebook codebook;
  ScoredSvmModel svm;
  GaussianNaiveBayes nb;

  bool trained() const noexcept { return codebook.k() >= 2 && svm.trained() && nb.trained(); }
};

/// Feature extraction fans out over `threads`; everything else is serial, so
/// the model does not depend on the thread count.
BaselineModel train_baseline(const Dataset& train_set, const BaselineConfig& cfg,
                             std::size_t threads = 1);

struct BaselinePrediction {
  ClassLabel label = ClassLabel::kOthers;
  ClassProbs probs{};
  bool no_keypoints = false;
  bool used_naive_bayes = false;
};

/// Throws std::logic_error for an untrained model.
BaselinePrediction classify_baseline(const Tensor& image, const BaselineModel& model);

class BaselineClassifier final : public Classifier {
 public:
  explicit BaselineClassifier(const BaselineModel& model) : model_(model) {}
  std::string name() const override { return "sift-bow-svm"; }
  ClassProbs predict_proba(const Tensor& image) const override {
    return classify_baseline(image, model_).probs;
  }

 private:
  const BaselineModel& model_;
};

class BaselineModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_baseline(const BaselineModel& model);
BaselineModel decode_baseline(std::span<const std::uint8_t> bytes);
void save_baseline(const BaselineModel& model, const std::filesystem::path& path);
BaselineModel load_baseline(const std::filesystem::path& path);

}  // namespace parasnet::baseline
